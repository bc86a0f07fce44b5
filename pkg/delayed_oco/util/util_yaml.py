"""
Reading config documents.

Experiment configs are JSON documents; JSON is a subset of YAML, so a single
ruamel loader handles both and hand-written YAML configs work too.
"""
import io
import os
import ubelt as ub


@ub.memoize
def _safe_yaml_obj():
    import ruamel.yaml
    yaml_obj = ruamel.yaml.YAML(typ='safe', pure=True)
    yaml_obj.default_flow_style = False
    return yaml_obj


class Yaml:
    """
    Namespace for yaml functions

    Example:
        >>> from delayed_oco.util.util_yaml import Yaml
        >>> data = Yaml.coerce('{"learner": "dub", "d": 3}')
        >>> sorted(data.items())
        [('d', 3), ('learner', 'dub')]
        >>> Yaml.loads(Yaml.dumps({'a': [1, 2]}))
        {'a': [1, 2]}
    """

    @staticmethod
    def dumps(data):
        """
        Dump yaml to a string representation

        Args:
            data (Any): yaml representable data

        Returns:
            str: yaml text
        """
        file = io.StringIO()
        _safe_yaml_obj().dump(_to_builtin(data), file)
        return file.getvalue()

    @staticmethod
    def loads(text):
        """
        Args:
            text (str): yaml or json text

        Returns:
            object
        """
        file = io.StringIO(text)
        return _safe_yaml_obj().load(file)

    @staticmethod
    def load(file):
        """
        Args:
            file (str | PathLike | IO): path to a document or an open file

        Returns:
            object
        """
        if isinstance(file, (str, os.PathLike)):
            fpath = ub.Path(file)
            if not fpath.exists():
                raise FileNotFoundError(f'Config document {fpath} does not exist')
            text = fpath.read_text()
        else:
            text = file.read()
        return Yaml.loads(text)

    @staticmethod
    def coerce(data):
        """
        Coerce an existing path, yaml / json text, or parsed data into data.

        Args:
            data (str | PathLike | dict | list | None)

        Returns:
            object

        Example:
            >>> from delayed_oco.util.util_yaml import Yaml
            >>> Yaml.coerce(None) is None
            True
            >>> Yaml.coerce({'kind': 'linear'})
            {'kind': 'linear'}
            >>> Yaml.coerce('kind: rmse')
            {'kind': 'rmse'}
        """
        if isinstance(data, os.PathLike):
            return Yaml.load(data)
        if isinstance(data, str):
            maybe_path = None
            if '\n' not in data and len(data) < 1024:
                try:
                    maybe_path = ub.Path(data)
                    if not maybe_path.is_file():
                        maybe_path = None
                except OSError:
                    maybe_path = None
            if maybe_path is not None:
                return Yaml.load(maybe_path)
            return Yaml.loads(data)
        return data


def _to_builtin(data):
    """
    Convert numpy scalars and arrays into plain python before dumping.
    """
    import numpy as np
    if isinstance(data, dict):
        return {str(k): _to_builtin(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [_to_builtin(v) for v in data]
    if isinstance(data, np.ndarray):
        return _to_builtin(data.tolist())
    if isinstance(data, np.generic):
        return data.item()
    return data
