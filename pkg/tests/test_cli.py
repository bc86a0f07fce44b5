def _fresh_dpath(name):
    import ubelt as ub
    return ub.Path.appdir('delayed_oco/tests/test_cli', name).delete().ensuredir()


def test_cli_run_writes_artifacts():
    """
    Run one experiment in process and check the CSV layout
    """
    import pandas as pd
    from delayed_oco.main import DelayedOCOCLI, EXIT_OK
    dpath = _fresh_dpath('run')
    ret = DelayedOCOCLI.run.main(cmdline=0, learner='adahedged', d=3, T=25,
                                 delay=2, hinter='recent_g', out_dpath=dpath)
    assert ret == EXIT_OK
    table = pd.read_csv(dpath / 'rounds.csv')
    assert len(table) == 25
    expected = ['t', 'loss', 'cum_loss', 'regret_best', 'lambda', 'delta',
                'b_t', 'a_t', 'w_0', 'w_1', 'w_2', 'ell_0', 'ell_1', 'ell_2']
    assert table.columns.tolist() == expected
    assert (dpath / 'summary.json').exists()


def test_cli_run_is_deterministic():
    from delayed_oco.main import DelayedOCOCLI
    texts = []
    for name in ['det1', 'det2']:
        dpath = _fresh_dpath(name)
        DelayedOCOCLI.run.main(cmdline=0, learner='dormplus', d=4, T=30, delay=1,
                               seed=5, out_dpath=dpath, verbose=0)
        texts.append((dpath / 'rounds.csv').read_text())
    assert texts[0] == texts[1]


def test_cli_run_from_a_document_with_overrides():
    import json
    from delayed_oco.main import DelayedOCOCLI, EXIT_OK
    dpath = _fresh_dpath('document')
    fpath = dpath / 'config.json'
    fpath.write_text(json.dumps({'learner': 'dub', 'd': 2, 'T': 15, 'delay': 1}))
    ret = DelayedOCOCLI.run.main(cmdline=0, config_fpath=fpath, seed=3,
                                 out_dpath=dpath / 'out')
    assert ret == EXIT_OK
    summary = json.loads((dpath / 'out' / 'summary.json').read_text())
    assert summary['config']['learner'] == 'dub'
    assert summary['config']['seed'] == 3
    assert summary['T'] == 15


def test_cli_constant_lambda_column():
    import pandas as pd
    from delayed_oco.main import DelayedOCOCLI
    dpath = _fresh_dpath('const')
    DelayedOCOCLI.run.main(cmdline=0, learner='odaftrl-const', lam=0.5, d=2, T=1,
                           out_dpath=dpath, verbose=0)
    table = pd.read_csv(dpath / 'rounds.csv')
    assert len(table) == 1
    assert table['lambda'].tolist() == [0.5]


def test_cli_config_errors_exit_with_two():
    import json
    from delayed_oco.main import DelayedOCOCLI, EXIT_CONFIG
    dpath = _fresh_dpath('errors')
    assert DelayedOCOCLI.run.main(cmdline=0, d=0, out_dpath=dpath) == EXIT_CONFIG
    assert DelayedOCOCLI.run.main(cmdline=0, delay=dpath / 'missing.csv', out_dpath=dpath) == EXIT_CONFIG
    fpath = dpath / 'bad.json'
    fpath.write_text(json.dumps({'learner': 'dub', 'unknown_field': 1}))
    assert DelayedOCOCLI.run.main(cmdline=0, config_fpath=fpath, out_dpath=dpath) == EXIT_CONFIG
    assert DelayedOCOCLI.run.main(cmdline=0, config_fpath=dpath / 'nope.json') == EXIT_CONFIG
    assert DelayedOCOCLI.verify.main(cmdline=0, csv=dpath / 'nope.csv') == EXIT_CONFIG


def test_cli_verify_detects_tampering():
    import pandas as pd
    from delayed_oco.main import DelayedOCOCLI, EXIT_OK, EXIT_UNCERTIFIED
    dpath = _fresh_dpath('verify')
    DelayedOCOCLI.run.main(cmdline=0, learner='dorm', d=3, T=40, delay=3,
                           out_dpath=dpath, verbose=0)
    csv_fpath = dpath / 'rounds.csv'
    summary_fpath = dpath / 'summary.json'
    ret = DelayedOCOCLI.verify.main(cmdline=0, csv=csv_fpath, summary=summary_fpath)
    assert ret == EXIT_OK
    table = pd.read_csv(csv_fpath)
    table.loc[len(table) - 1, 'loss'] += 1.0
    tampered = dpath / 'tampered.csv'
    table.to_csv(tampered, index=False)
    ret = DelayedOCOCLI.verify.main(cmdline=0, csv=tampered, summary=summary_fpath)
    assert ret == EXIT_UNCERTIFIED


def test_cli_sweep():
    import json
    import pandas as pd
    from delayed_oco.main import DelayedOCOCLI, EXIT_OK
    dpath = _fresh_dpath('sweep')
    fpath = dpath / 'config.json'
    fpath.write_text(json.dumps({'learner': 'adahedged', 'd': 3, 'T': 20}))
    ret = DelayedOCOCLI.sweep.main(cmdline=0, config_fpath=fpath, param='delay',
                                   values='0,1', runs=2, out_dpath=dpath / 'out')
    assert ret == EXIT_OK
    table = pd.read_csv(dpath / 'out' / 'sweep_summary.csv')
    assert table['value'].tolist() == [0, 0, 1, 1]
    assert table['seed'].tolist() == [0, 1, 0, 1]
    assert table['certified'].all()


def test_cli_module_entry_point():
    """
    Run the installed module as a subprocess
    """
    import sys
    import ubelt as ub
    dpath = _fresh_dpath('module')
    info = ub.cmd([sys.executable, '-m', 'delayed_oco', 'run', '--learner', 'dub',
                   '--d', '3', '--T', '20', '--delay', '2',
                   '--out_dpath', str(dpath)], verbose=3)
    assert info.returncode == 0
    assert (dpath / 'rounds.csv').exists()
    info = ub.cmd([sys.executable, '-m', 'delayed_oco', 'verify',
                   str(dpath / 'rounds.csv'), '--summary', str(dpath / 'summary.json')], verbose=3)
    assert info.returncode == 0
