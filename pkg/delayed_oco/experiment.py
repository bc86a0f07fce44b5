"""
Experiment driver for delayed-feedback runs.

An :class:`ExperimentConfig` wires together a delay schedule, an environment,
a learner and (optionally) a hint strategy or a learned hinter.
:func:`run_experiment` executes the round protocol

1. build the hint of round t from the feedback revealed so far,
2. play ``w_t``,
3. evaluate the loss and hand the subgradient to the learner, which reveals
   whatever the schedule makes due,

and afterwards writes a per-round CSV and a JSON summary with the regret
certificates.

Example:
    >>> from delayed_oco.experiment import ExperimentConfig, run_experiment
    >>> dpath = ub.Path.appdir('delayed_oco/tests/doctest_experiment').delete().ensuredir()
    >>> config = ExperimentConfig(learner='dormplus', d=2, T=20, delay=1,
    >>>                           env={'generator': 'fixed-best', 'sigma': 0.5},
    >>>                           out_dpath=dpath)
    >>> run = run_experiment(config)
    >>> run.summary['certified']
    True
    >>> sorted(p.name for p in dpath.ls())
    ['rounds.csv', 'summary.json']
"""
import json
import logging
import math
import os
import numpy as np
import scriptconfig as scfg
import ubelt as ub

from delayed_oco import bounds
from delayed_oco.base_learner import LEARNER_KINDS, Learner
from delayed_oco.closed_forms import PNormConfig
from delayed_oco.core import DelaySchedule, InvalidInputError
from delayed_oco.envlab import best_competitor_regret, make_environment
from delayed_oco.hinting import (HINT_STRATEGIES, MEAN_MODES, AdaptiveHinter,
                                 constant_hint, make_adapter, sync_feedback)
from delayed_oco.util.util_yaml import Yaml

logger = logging.getLogger(__name__)

#: slack allowed when comparing measured regret against a certificate
CERTIFICATE_TOL = 1e-8


class ConfigError(ValueError):
    ...


class ExperimentConfig(scfg.DataConfig):
    """
    Parameters of a single delayed online learning run.
    """
    learner = scfg.Value('adahedged', choices=list(LEARNER_KINDS), help='the learner to run', group='learner')
    d = scfg.Value(3, help='number of experts', group='learner')
    T = scfg.Value(100, help='number of rounds', group='learner')
    delay = scfg.Value(0, help=ub.paragraph(
        '''
        A constant delay D, or the path of a CSV schedule with columns
        t,reveal_time.
        '''), group='learner')
    q = scfg.Value('auto', help='dual exponent of the regret-matching learners, "auto" for q_opt(d)', group='learner')
    lam = scfg.Value(None, alias=['lambda'], help='regularization weight of the constant tuning', group='learner')
    alpha = scfg.Value('auto', help='scale of the adaptive tunings, "auto" for ln(d)', group='learner')

    hinter = scfg.Value('none', help=ub.paragraph(
        '''
        A constant hint strategy (recent_g, prev_g, mean_g, none), or
        "learned" to combine the hint_columns with a learned hinter.
        '''), group='hints')
    hint_columns = scfg.Value(['recent_g', 'prev_g', 'mean_g', 'none'], help='strategies combined by the learned hinter', group='hints')
    mean_mode = scfg.Value('verbatim', choices=list(MEAN_MODES), help='scaling of the mean_g strategy', group='hints')

    env = scfg.Value({}, help=ub.paragraph(
        '''
        Environment parameters as a dict or YAML / JSON text. The "kind" key
        selects "linear" (default) or "rmse"; d, T and seed are filled in
        from this config.
        '''), group='env')
    seed = scfg.Value(0, help='random seed of the environment', group='env')

    out_dpath = scfg.Value('auto', help='output directory, "auto" uses the application cache', group='output')
    tol = scfg.Value(CERTIFICATE_TOL, help='slack when checking regret against certificates', group='output')

    def __post_init__(config):
        for key in ['delay', 'out_dpath']:
            if isinstance(config[key], os.PathLike):
                config[key] = os.fspath(config[key])
        config['env'] = Yaml.coerce(config['env']) or {}
        if not isinstance(config['env'], dict):
            raise ConfigError(f'env must be a mapping, got {config["env"]!r}')
        if isinstance(config['hint_columns'], str):
            config['hint_columns'] = [p.strip() for p in config['hint_columns'].split(',') if p.strip()]
        if isinstance(config['hinter'], (list, tuple)):
            config['hint_columns'] = list(config['hinter'])
            config['hinter'] = 'learned'
        if isinstance(config['delay'], str) and config['delay'].strip().isdigit():
            config['delay'] = int(config['delay'])
        try:
            config['d'] = int(config['d'])
            config['T'] = int(config['T'])
            config['seed'] = int(config['seed'])
        except (TypeError, ValueError) as ex:
            raise ConfigError(f'd, T and seed must be integers: {ex}')
        if config['d'] < 1:
            raise ConfigError(f'd={config["d"]} must be a positive integer')
        if config['T'] < 1:
            raise ConfigError(f'T={config["T"]} must be at least 1')
        if config['learner'] not in LEARNER_KINDS:
            raise ConfigError(f'learner={config["learner"]!r} must be one of {LEARNER_KINDS}')
        if config['hinter'] != 'learned' and config['hinter'] not in HINT_STRATEGIES:
            raise ConfigError(f'hinter={config["hinter"]!r} must be learned or one of {HINT_STRATEGIES}')
        for strategy in config['hint_columns']:
            if strategy not in HINT_STRATEGIES:
                raise ConfigError(f'hint_columns has an unknown strategy {strategy!r}')
        try:
            config['q'] = PNormConfig.coerce(config['q'], d=config['d']).q
        except InvalidInputError as ex:
            raise ConfigError(f'q: {ex}')
        if config['alpha'] in (None, 'auto'):
            from delayed_oco.ftrl_learners import default_alpha
            config['alpha'] = default_alpha(config['d'])
        if config['out_dpath'] == 'auto':
            name = f'{config["learner"]}-d{config["d"]}-T{config["T"]}-seed{config["seed"]}'
            config['out_dpath'] = str(ub.Path.appdir('delayed_oco/runs') / name)

    def build_schedule(config):
        try:
            return DelaySchedule.coerce(config['delay'])
        except (InvalidInputError, FileNotFoundError, OSError) as ex:
            raise ConfigError(f'delay: {ex}')

    def build_learner(config, schedule):
        kwargs = {'q': config['q'], 'alpha': config['alpha']}
        if config['lam'] is not None:
            kwargs['lam'] = config['lam']
        try:
            return Learner.create(config['learner'], d=config['d'], schedule=schedule, **kwargs)
        except InvalidInputError as ex:
            raise ConfigError(f'learner: {ex}')

    def build_environment(config):
        try:
            env = make_environment(config['env'], d=config['d'], T=config['T'], seed=config['seed'])
        except InvalidInputError as ex:
            raise ConfigError(f'env: {ex}')
        return env


class ExperimentRun(ub.NiceRepr):
    """
    Everything recorded by one run: the learner history, per-round losses,
    the regret record and (for learned hints) the hinter history.
    """

    def __init__(self, config, env, history, losses, expert_losses, hinter=None):
        self.config = config
        self.env = env
        self.history = history
        self.losses = np.asarray(losses, dtype=float)
        self.expert_losses = np.asarray(expert_losses, dtype=float).reshape(len(losses), history.d)
        self.hinter = hinter
        self.record = best_competitor_regret(self.expert_losses, learner_losses=self.losses)
        self.summary = None

    def __nice__(self):
        return f'{self.history.kind}, T={self.history.T}, regret={self.record.best:.6g}'

    def table(self):
        """
        Per-round values as a DataFrame with the CSV column layout.
        """
        import pandas as pd
        history = self.history
        T, d = history.T, history.d
        terms = bounds.per_round_terms(history)
        cum_loss = np.zeros(T)
        running = 0.0
        expert_running = np.zeros(d)
        regret_best = np.zeros(T)
        for t in range(T):
            running += self.losses[t]
            expert_running = expert_running + self.expert_losses[t]
            cum_loss[t] = running
            regret_best[t] = running - expert_running.min()
        deltas = getattr(history, 'deltas', None)
        if deltas is None or len(deltas) < T:
            deltas = np.full(T, np.nan)
        columns = {
            't': np.arange(1, T + 1),
            'loss': self.losses,
            'cum_loss': cum_loss,
            'regret_best': regret_best,
            'lambda': np.asarray(history.lambdas, dtype=float)[:T],
            'delta': np.asarray(deltas, dtype=float)[:T],
            'b_t': terms.b,
            'a_t': terms.a,
        }
        for i in range(d):
            columns[f'w_{i}'] = history.plays[:, i]
        if self.hinter is not None:
            for j in range(self.hinter.d):
                columns[f'omega_{j}'] = self.hinter.plays[:, j]
        for i in range(d):
            columns[f'ell_{i}'] = self.expert_losses[:, i]
        return pd.DataFrame(columns)


def play_rounds(learner, env, T, hinter='none', mean_mode='verbatim'):
    """
    Run the delayed feedback protocol for ``T`` rounds.

    Args:
        learner (Learner): a fresh learner
        env (LinearEnvironment | RmseEnvironment): the loss environment
        T (int): number of rounds
        hinter (str | AdaptiveHinter): a constant strategy or a learned
            hinter
        mean_mode (str): scaling of the mean_g strategy

    Returns:
        Tuple[LearnerHistory, List[float], List[np.ndarray]]:
            the finalized history, learner losses and expert losses

    Example:
        >>> from delayed_oco.base_learner import Learner
        >>> from delayed_oco.envlab import LinearEnvironment
        >>> from delayed_oco.experiment import play_rounds
        >>> env = LinearEnvironment(np.tile([0., 1.], (10, 1)))
        >>> history, losses, _ = play_rounds(Learner.create('dorm', d=2, schedule=2), env, 10)
        >>> losses[:4]
        [0.5, 0.5, 0.5, 0.0]
    """
    adapter = None
    if isinstance(hinter, AdaptiveHinter):
        adapter = make_adapter(learner)
    losses = []
    expert_losses = []
    for t in range(1, T + 1):
        frame = learner.hint_frame()
        if adapter is not None:
            sync_feedback(hinter, adapter, learner)
            hint = hinter.hint(hinter.matrix(frame))
        elif hinter != 'none':
            hint = constant_hint(hinter, frame.revealed, frame.t + 1, frame.schedule,
                                 d=frame.d, space=frame.space, plays=frame.plays,
                                 mean_mode=mean_mode)
        else:
            hint = None
        w = learner.play(hint)
        loss, g = env.loss_and_subgradient(t, w)
        losses.append(loss)
        expert_losses.append(env.expert_losses(t))
        learner.submit(g)
    history = learner.finalize()
    if adapter is not None:
        sync_feedback(hinter, adapter, learner, final=True)
    return history, losses, expert_losses


def _certificate_forms(history, q):
    if history.kind in bounds.FTRL_KINDS:
        return ['theorem', 'tight']
    forms = ['theorem']
    d = history.d
    if d >= 2 and q == PNormConfig.coerce('auto', d=d).q:
        forms.append('log2')
    return forms


def certify(run, tol=CERTIFICATE_TOL):
    """
    Compare the linearized regret against every vertex with the learner's
    certificates.

    Returns:
        dict: summary entries for the certificates
    """
    history = run.history
    d = history.d
    eye = np.eye(d)
    linearized = [bounds.linearized_regret(history, eye[i]) for i in range(d)]
    q = getattr(history, 'q', None)
    certificates = {}
    holds = {}
    for form in _certificate_forms(history, q):
        values = [bounds.regret_certificate(history.kind, history, eye[i], form=form)
                  for i in range(d)]
        certificates[form] = values
        holds[form] = bool(all(r <= c + tol for r, c in zip(linearized, values)))
    info = {
        'linearized_regret_per_vertex': linearized,
        'certificates': certificates,
        'certified_by_form': holds,
        'certified': all(holds.values()),
    }
    if run.hinter is not None:
        hint_hist = run.hinter
        hint_regret = float(np.max(hint_hist.linearized_regret)) if hint_hist.T else 0.0
        hint_cert = bounds.hint_certificate(hint_hist, form='theorem')
        info['hinter'] = {
            'strategies': list(hint_hist.strategies),
            'final_weights': hint_hist.plays[-1].tolist() if hint_hist.T else [],
            'column_regret': hint_hist.column_regret.tolist(),
            'linearized_column_regret': hint_hist.linearized_regret.tolist(),
            'certificate': hint_cert,
            'interpretable_certificate': bounds.hint_certificate(hint_hist, form='interpretable'),
            'certified': bool(hint_regret <= hint_cert + tol),
        }
        info['certified'] = info['certified'] and info['hinter']['certified']
    return info


def run_experiment(config, write=True):
    """
    Execute one run described by an :class:`ExperimentConfig`.

    Args:
        config (ExperimentConfig | dict): run parameters
        write (bool): write ``rounds.csv`` and ``summary.json`` into the
            output directory

    Returns:
        ExperimentRun
    """
    if not isinstance(config, ExperimentConfig):
        config = ExperimentConfig(**config)
    schedule = config.build_schedule()
    learner = config.build_learner(schedule)
    env = config.build_environment()
    if env.d != config['d']:
        raise ConfigError(f'the environment has {env.d} experts but d={config["d"]}')
    if env.T < config['T']:
        raise ConfigError(f'the environment has {env.T} rounds but T={config["T"]}')
    hinter = config['hinter']
    if hinter == 'learned':
        try:
            adapter = make_adapter(learner)
        except InvalidInputError as ex:
            raise ConfigError(f'hinter: {ex}')
        hinter = AdaptiveHinter(config['hint_columns'], q_norm=adapter.q_norm,
                                mean_mode=config['mean_mode'])
    logger.info('running %s for %d rounds with %s', learner, config['T'], schedule)
    history, losses, expert_losses = play_rounds(
        learner, env, config['T'], hinter=hinter, mean_mode=config['mean_mode'])
    hint_hist = None
    if isinstance(hinter, AdaptiveHinter):
        hint_hist = hinter.history()
        hint_hist.column_regret = np.atleast_1d(hinter.column_regret())
        hint_hist.linearized_regret = np.atleast_1d(hinter.linearized_column_regret())
    run = ExperimentRun(config, env, history, losses, expert_losses, hinter=hint_hist)
    summary = {
        'config': config.to_dict(),
        'env_kind': env.kind,
        'T': history.T,
        'regret': run.record.to_dict(),
    }
    summary.update(certify(run, tol=float(config['tol'])))
    run.summary = summary
    if not summary['certified']:
        logger.warning('%s regret exceeds its certificate', history.kind)
    if write:
        dpath = ub.Path(config['out_dpath']).ensuredir()
        run.csv_fpath = emit_csv(run, dpath / 'rounds.csv')
        run.summary_fpath = dpath / 'summary.json'
        run.summary_fpath.write_text(json.dumps(_jsonable(summary), indent=2))
        logger.info('wrote %s', dpath)
    return run


def _jsonable(data):
    from delayed_oco.util.util_yaml import _to_builtin
    data = _to_builtin(data)
    if isinstance(data, dict):
        return {k: _jsonable(v) for k, v in data.items()}
    if isinstance(data, list):
        return [_jsonable(v) for v in data]
    if isinstance(data, float) and not math.isfinite(data):
        return None
    return data


def emit_csv(run, fpath):
    """
    Write the per-round table of a run.

    Columns are ``t,loss,cum_loss,regret_best,lambda,delta,b_t,a_t,w_*``,
    then ``omega_*`` for learned hints and ``ell_*`` (each expert's loss).

    Returns:
        ub.Path
    """
    fpath = ub.Path(fpath)
    run.table().to_csv(fpath, index=False, float_format='%.12g')
    return fpath


def verify_csv(csv_fpath, summary_fpath=None, atol=1e-9):
    """
    Re-accumulate the regret of a run from its CSV.

    The learner's cumulative loss and each expert's cumulative loss are
    summed from the per-round columns and compared with the recorded
    ``cum_loss`` and ``regret_best`` columns and, when given, the summary.
    Differences are measured relative to ``max(1, |value|)``.

    Returns:
        dict: a report with an ``ok`` flag

    Example:
        >>> from delayed_oco.experiment import ExperimentConfig, run_experiment, verify_csv
        >>> dpath = ub.Path.appdir('delayed_oco/tests/doctest_verify').ensuredir()
        >>> run = run_experiment(ExperimentConfig(learner='dub', d=3, T=30, delay=2, out_dpath=dpath))
        >>> verify_csv(run.csv_fpath, run.summary_fpath)['ok']
        True
    """
    import pandas as pd
    table = pd.read_csv(csv_fpath)
    ell_cols = sorted([c for c in table.columns if c.startswith('ell_')],
                      key=lambda c: int(c.split('_')[1]))
    if not ell_cols or 'loss' not in table.columns:
        raise InvalidInputError(f'{csv_fpath} has no loss columns to re-accumulate')
    total = 0.0
    for value in table['loss']:
        total += float(value)
    expert_totals = np.zeros(len(ell_cols))
    for row in table[ell_cols].to_numpy(dtype=float):
        expert_totals = expert_totals + row
    regret_best = total - float(expert_totals.min()) if len(table) else 0.0

    def close(a, b):
        return abs(a - b) <= atol * max(1.0, abs(b))

    checks = {}
    if len(table):
        checks['cum_loss'] = close(total, float(table['cum_loss'].iloc[-1]))
        checks['regret_best'] = close(regret_best, float(table['regret_best'].iloc[-1]))
    if summary_fpath is not None:
        summary = json.loads(ub.Path(summary_fpath).read_text())
        checks['summary_cum_loss'] = close(total, float(summary['regret']['cum_loss']))
        checks['summary_regret_best'] = close(regret_best, float(summary['regret']['regret_best']))
    report = {
        'rows': len(table),
        'cum_loss': total,
        'regret_best': regret_best,
        'checks': checks,
        'ok': all(checks.values()),
    }
    return report


def _sweep_job(config_data):
    run = run_experiment(ExperimentConfig(**config_data))
    return run.summary


def sweep(base, param, values, runs=1, out_dpath=None, workers=0):
    """
    Run a config for several values of one parameter (and several seeds).

    Args:
        base (dict): base config fields
        param (str): name of the swept field
        values (List[Any]): values of the swept field
        runs (int): seeds per value, starting at the base seed
        out_dpath (str | PathLike | None): root of the run directories
        workers (int): parallel processes, 0 runs in the foreground

    Returns:
        pandas.DataFrame: one row per run, also written as
        ``sweep_summary.csv``
    """
    import pandas as pd
    base = dict(base)
    if param not in ExperimentConfig.__default__:
        raise ConfigError(f'cannot sweep unknown parameter {param!r}')
    if out_dpath is None:
        out_dpath = ub.Path.appdir('delayed_oco/sweeps') / param
    out_dpath = ub.Path(out_dpath).ensuredir()
    seed0 = int(base.get('seed', 0))
    jobs = []
    for value in values:
        for k in range(int(runs)):
            data = base.copy()
            data[param] = value
            data['seed'] = seed0 + k if param != 'seed' else value
            data['out_dpath'] = str(out_dpath / f'{param}={value}' / f'run{k}')
            # validate before dispatching to workers
            ExperimentConfig(**data)
            jobs.append((value, k, data))
    mode = 'serial' if workers == 0 else 'process'
    rows = []
    with ub.Executor(mode=mode, max_workers=workers) as executor:
        futures = [executor.submit(_sweep_job, data) for _, _, data in jobs]
        for (value, k, data), future in zip(jobs, futures):
            summary = future.result()
            rows.append({
                'param': param,
                'value': value,
                'run': k,
                'seed': data['seed'],
                'regret_best': summary['regret']['regret_best'],
                'certified': summary['certified'],
                'out_dpath': data['out_dpath'],
            })
    table = pd.DataFrame(rows)
    table.to_csv(out_dpath / 'sweep_summary.csv', index=False, float_format='%.12g')
    return table
