#!/usr/bin/env python
"""
Packaging for delayed_oco.

CommandLine:
    python -c "import setup, ubelt; print(ubelt.urepr(setup.parse_requirements('requirements.txt')))"
"""
import ast
import re
from os.path import dirname, exists, join
from setuptools import find_packages
from setuptools import setup


def parse_version(fpath):
    """
    Statically parse ``__version__`` without importing the package
    """
    with open(fpath, "r") as file_:
        tree = ast.parse(file_.read())
    for node in tree.body:
        if isinstance(node, ast.Assign):
            names = [getattr(t, "id", None) for t in node.targets]
            if "__version__" in names:
                return node.value.value
    raise ValueError("no __version__ in {!r}".format(fpath))


def parse_description():
    """
    The README, when it ships next to this file
    """
    readme_fpath = join(dirname(__file__), "README.rst")
    if exists(readme_fpath):
        with open(readme_fpath, "r") as f:
            return f.read()
    return ""


def parse_requirements(fname, versions="loose"):
    """
    Read a requirements file, following ``-r`` includes.

    Args:
        fname (str): path to the requirements file
        versions (str): "loose" keeps the version specifiers as written,
            "strict" pins each ``>=`` to its minimum, anything else drops
            the versions.

    Returns:
        List[str]
    """
    items = []
    if not exists(fname):
        return items
    dpath = dirname(fname)
    with open(fname, "r") as f:
        lines = [line.split(" #")[0].strip() for line in f.readlines()]
    for line in lines:
        if not line or line.startswith("#"):
            continue
        if line.startswith("-r "):
            items.extend(parse_requirements(join(dpath, line.split(" ")[1]), versions))
            continue
        pkgpart, _, platpart = line.partition(";")
        parts = [p.strip() for p in re.split("(>=|==|>)", pkgpart, maxsplit=1)]
        item = parts[0]
        if len(parts) > 1 and versions == "strict":
            item += parts[1].replace(">=", "==") + parts[2]
        elif len(parts) > 1 and versions == "loose":
            item += parts[1] + parts[2]
        if platpart.strip():
            item += ";" + platpart.strip()
        items.append(item)
    return items


NAME = "delayed_oco"
INIT_PATH = "delayed_oco/__init__.py"
VERSION = parse_version(INIT_PATH)
if __name__ == "__main__":
    setupkw = {}
    setupkw["install_requires"] = parse_requirements("requirements/runtime.txt")
    setupkw["extras_require"] = {
        name: parse_requirements(fpath, versions=mode)
        for key, fpath in [
            ("all", "requirements.txt"),
            ("runtime", "requirements/runtime.txt"),
            ("tests", "requirements/tests.txt"),
            ("docs", "requirements/docs.txt"),
            ("linting", "requirements/linting.txt"),
        ]
        for name, mode in [(key, "loose"), (key + "-strict", "strict")]
    }
    setupkw["name"] = NAME
    setupkw["version"] = VERSION
    setupkw["author"] = "delayed_oco developers"
    setupkw["author_email"] = ""
    setupkw["url"] = ""
    setupkw["description"] = "Delayed optimistic online learning over the simplex with regret certificates"
    setupkw["long_description"] = parse_description()
    setupkw["long_description_content_type"] = "text/x-rst"
    setupkw["license"] = "Apache 2"
    setupkw["packages"] = find_packages(".", include=["delayed_oco", "delayed_oco.*"])
    setupkw["python_requires"] = ">=3.9"
    setupkw["classifiers"] = [
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ]
    setupkw["package_data"] = {"": ["requirements/*.txt"]}
    setupkw["entry_points"] = {
        "console_scripts": [
            "delayed_oco = delayed_oco.__main__:main",
        ],
    }
    setup(**setupkw)
