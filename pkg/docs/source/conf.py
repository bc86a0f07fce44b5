"""
Sphinx configuration for delayed_oco.

CommandLine:
    # regenerate the api stubs from the repo root
    sphinx-apidoc --private --separate --force --output-dir docs/source/auto delayed_oco

    # build the html docs
    sphinx-build -b html docs/source docs/build/html
"""
import re
from os.path import dirname, join


def read_release(init_fpath):
    """
    The ``__version__`` string of the package, read without importing it
    """
    with open(init_fpath, 'r') as file:
        match = re.search(r"^__version__ = ['\"]([^'\"]+)['\"]", file.read(), re.M)
    return match.group(1)


project = 'delayed_oco'
copyright = '2026, delayed_oco developers'
author = 'delayed_oco developers'
modname = 'delayed_oco'

repo_dpath = dirname(dirname(dirname(__file__)))
release = read_release(join(repo_dpath, modname, '__init__.py'))
version = '.'.join(release.split('.')[0:2])

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    'sphinx.ext.intersphinx',
    'sphinx.ext.napoleon',
    'sphinx.ext.todo',
    'sphinx.ext.viewcode',
    'sphinx.ext.mathjax',
    'myst_parser',
]

todo_include_todos = True
napoleon_google_docstring = True
napoleon_use_param = False
napoleon_use_ivar = True

autodoc_inherit_docstrings = False
autodoc_member_order = 'bysource'
autoclass_content = 'both'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'pandas': ('https://pandas.pydata.org/docs/', None),
    'ubelt': ('https://ubelt.readthedocs.io/en/latest/', None),
    'scriptconfig': ('https://scriptconfig.readthedocs.io/en/latest/', None),
    'rich': ('https://rich.readthedocs.io/en/latest/', None),
}

templates_path = ['_templates']
source_suffix = ['.rst', '.md']
master_doc = 'index'
language = 'en'
exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
html_theme_options = {
    'collapse_navigation': False,
    'display_version': True,
}
htmlhelp_basename = project + 'doc'

latex_documents = [
    (master_doc, 'delayed_oco.tex', 'delayed_oco Documentation',
     'delayed_oco developers', 'manual'),
]
