#!/usr/bin/env python3
# PYTHON_ARGCOMPLETE_OK
"""
This is the main script for the delayed_oco CLI. The :class:`DelayedOCOCLI`
defines the available subcommands. For help run:

.. code:: bash

    delayed_oco --help

Exit codes: 0 when every checked certificate holds, 1 when a measured
regret exceeds its certificate (or ``verify`` finds a mismatch), 2 for
invalid configuration.
"""
import scriptconfig as scfg
import ubelt as ub
import rich

from delayed_oco.experiment import ConfigError, ExperimentConfig

EXIT_OK = 0
EXIT_UNCERTIFIED = 1
EXIT_CONFIG = 2


def _config_errors():
    from delayed_oco.core import InvalidInputError
    return (ConfigError, InvalidInputError, FileNotFoundError, KeyError)


def _load_document(fpath, known):
    from delayed_oco.util.util_yaml import Yaml
    doc = Yaml.load(fpath)
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f'config document {fpath} must be a mapping')
    unknown = set(doc) - set(known)
    if unknown:
        raise ConfigError(f'config document {fpath} has unknown fields {sorted(unknown)}')
    return doc


def _parse(cls, cmdline, kwargs):
    """
    Parse a command config. For experiment commands with a ``config_fpath``
    the document is loaded underneath the flags and keyword arguments;
    keyword values equal to the field default do not override the document.
    """
    config = cls.cli(cmdline=cmdline, data=kwargs, strict=True)
    fpath = config.get('config_fpath', None)
    if fpath is not None and issubclass(cls, ExperimentConfig):
        doc = _load_document(fpath, cls.__default__)
        defaults = {k: getattr(v, 'value', v) for k, v in cls.__default__.items()}
        overrides = {k: v for k, v in kwargs.items()
                     if k not in defaults or v != defaults[k]}
        config = cls.cli(cmdline=cmdline, data={**doc, **overrides}, strict=True)
    return config


def _command_main(cls, cmdline, kwargs):
    from delayed_oco.util.util_logging import setup_logging
    setup_logging()
    try:
        config = _parse(cls, cmdline, kwargs)
    except _config_errors() as ex:
        rich.print(f'[red]config error[/red]: {ex}')
        return EXIT_CONFIG
    if config.verbose:
        rich.print('config = ' + ub.urepr(config, nl=1))
    try:
        return config.run()
    except _config_errors() as ex:
        rich.print(f'[red]config error[/red]: {ex}')
        return EXIT_CONFIG


class CommonConfig(scfg.DataConfig):
    verbose = scfg.Value(1, help='verbosity level')

    @classmethod
    def main(cls, cmdline=1, **kwargs):
        return _command_main(cls, cmdline, kwargs)


class DocumentConfig(CommonConfig):
    """
    A command whose first positional argument is an experiment config
    document used as the base of the command.
    """
    config_fpath = scfg.Value(None, position=1, help='path to a JSON or YAML config document')


def _summary_table(summary):
    from rich.table import Table
    table = Table(title='regret vs certificates')
    table.add_column('expert')
    table.add_column('linearized regret')
    forms = list(summary.get('certificates', {}))
    for form in forms:
        table.add_column(form)
    linearized = summary.get('linearized_regret_per_vertex', [])
    for i, value in enumerate(linearized):
        row = [str(i), f'{value:.6g}']
        row += [f'{summary["certificates"][form][i]:.6g}' for form in forms]
        table.add_row(*row)
    return table


class DelayedOCOCLI(scfg.ModalCLI):
    """
    Run and check delayed optimistic online learning experiments.

    Quickstart
    ##########

    .. code:: bash

        # A run is described by a JSON (or YAML) document
        echo '{"learner": "dormplus", "d": 3, "T": 200, "delay": 3, "hinter": "recent_g"}' > run.json

        # Run it; flags override fields of the document
        delayed_oco run run.json --seed 1 --out_dpath ./run1

        # Re-accumulate the regret from the per-round CSV
        delayed_oco verify --csv ./run1/rounds.csv --summary ./run1/summary.json

        # Sweep one parameter over several values and seeds
        delayed_oco sweep run.json --param delay --values 0,1,3 --runs 5
    """

    class run(ExperimentConfig):
        """
        run one experiment and certify its regret
        """
        __command__ = 'run'
        config_fpath = scfg.Value(None, position=1, help='path to a JSON or YAML config document')
        verbose = scfg.Value(1, help='verbosity level')

        @classmethod
        def main(cls, cmdline=1, **kwargs):
            return _command_main(cls, cmdline, kwargs)

        def run(config):
            from delayed_oco.experiment import run_experiment
            result = run_experiment(config)
            summary = result.summary
            if config.verbose:
                rich.print(_summary_table(summary))
                rich.print(f'regret vs best = {summary["regret"]["regret_best"]:.6g}, '
                           f'certified = {summary["certified"]}')
                rich.print(f'wrote {result.csv_fpath} and {result.summary_fpath}')
            return EXIT_OK if summary['certified'] else EXIT_UNCERTIFIED

    class sweep(DocumentConfig):
        """
        run an experiment for several values of one parameter
        """
        __command__ = 'sweep'
        param = scfg.Value(None, help='name of the config field to sweep')
        values = scfg.Value(None, help='comma separated values of the swept field')
        runs = scfg.Value(1, help='seeds per value')
        workers = scfg.Value(0, help='number of parallel processes, 0 runs in the foreground')
        out_dpath = scfg.Value(None, help='root directory of the sweep')

        def run(config):
            from delayed_oco.experiment import sweep
            from delayed_oco.util.util_yaml import Yaml
            if config.config_fpath is None:
                raise ConfigError('sweep needs a config document')
            if config.param is None or config['values'] is None:
                raise ConfigError('sweep needs --param and --values')
            base = _load_document(config.config_fpath, ExperimentConfig.__default__)
            values = config['values']
            if isinstance(values, str):
                values = [Yaml.loads(v.strip()) for v in values.split(',') if v.strip()]
            workers = config.workers
            if workers == 'auto':
                import psutil
                workers = psutil.cpu_count()
            table = sweep(base, config.param, values, runs=config.runs,
                          out_dpath=config.out_dpath, workers=int(workers))
            if config.verbose:
                rich.print(table.to_string())
            return EXIT_OK if bool(table['certified'].all()) else EXIT_UNCERTIFIED

    class verify(CommonConfig):
        """
        re-accumulate the regret of a run from its per-round CSV
        """
        __command__ = 'verify'
        csv = scfg.Value(None, position=1, help='path to a rounds.csv file')
        summary = scfg.Value(None, help='optional summary.json to compare against')
        atol = scfg.Value(1e-9, help='tolerance relative to max(1, |value|)')

        def run(config):
            from delayed_oco.experiment import verify_csv
            if config.csv is None:
                raise ConfigError('verify needs --csv')
            if not ub.Path(config.csv).exists():
                raise ConfigError(f'{config.csv} does not exist')
            report = verify_csv(config.csv, config.summary, atol=float(config.atol))
            if config.verbose:
                rich.print('report = ' + ub.urepr(report, nl=1))
            return EXIT_OK if report['ok'] else EXIT_UNCERTIFIED


main = DelayedOCOCLI.main


if __name__ == '__main__':
    """
    CommandLine:
        python -m delayed_oco run --learner dub --d 3 --T 50 --delay 2
    """
    main()
