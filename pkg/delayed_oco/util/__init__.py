"""
Helpers shared by the delayed_oco modules. Submodules are imported on first
attribute access; set ``EAGER_IMPORT=1`` to import everything up front.
"""
import importlib
import os

__submodules__ = {
    'util_algo': ['prefix_sums', 'window_sum', 'window_sums'],
    'util_logging': ['setup_logging'],
    'util_yaml': ['Yaml'],
}

_ATTR_TO_SUBMOD = {attr: submod for submod, attrs in __submodules__.items()
                   for attr in attrs}


def __getattr__(name):
    if name in __submodules__:
        value = importlib.import_module(f'{__name__}.{name}')
    elif name in _ATTR_TO_SUBMOD:
        module = importlib.import_module(f'{__name__}.{_ATTR_TO_SUBMOD[name]}')
        value = getattr(module, name)
    else:
        raise AttributeError(f'No {__name__} attribute {name}')
    globals()[name] = value
    return value


def __dir__():
    return __all__


if os.environ.get('EAGER_IMPORT', ''):
    for _name in list(__submodules__) + list(_ATTR_TO_SUBMOD):
        __getattr__(_name)

__all__ = ['Yaml', 'prefix_sums', 'setup_logging', 'util_algo',
           'util_logging', 'util_yaml', 'window_sum', 'window_sums']
