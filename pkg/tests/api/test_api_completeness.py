from __future__ import absolute_import

import importlib
import inspect

import pytest

MODULES = [
    'compas_mepoly.environments',
    'compas_mepoly.exceptions',
    'compas_mepoly.fitting',
    'compas_mepoly.networks',
    'compas_mepoly.polynomials',
    'compas_mepoly.training',
    'compas_mepoly.utilities',
]


def get_names_in_module(module_name):
    exceptions = ['absolute_import', 'division', 'print_function']
    module = importlib.import_module(module_name)
    all_names = module.__all__ if hasattr(module, '__all__') else dir(module)
    return sorted([i for i in all_names if not i.startswith('_') and i not in exceptions and not inspect.ismodule(getattr(module, i))])


def get_documented_names(module_name):
    """Names listed in the autosummary blocks of a module docstring."""
    module = importlib.import_module(module_name)
    names = set()
    in_block = False
    for line in (module.__doc__ or '').splitlines():
        stripped = line.strip()
        if stripped.startswith('.. autosummary::'):
            in_block = True
            continue
        if not in_block or not stripped or stripped.startswith(':'):
            continue
        if line.startswith('    '):
            names.add(stripped)
        else:
            in_block = False
    return names


@pytest.mark.parametrize('module_name', MODULES)
def test_public_api_is_documented(module_name):
    documented = get_documented_names(module_name)
    module = importlib.import_module(module_name)
    for name in get_names_in_module(module_name):
        if name.isupper():
            continue
        assert callable(getattr(module, name))
        assert name in documented, 'missing {} in {}'.format(name, module_name)


@pytest.mark.parametrize('module_name', MODULES)
def test_documented_names_exist(module_name):
    module = importlib.import_module(module_name)
    for name in get_documented_names(module_name):
        assert hasattr(module, name), '{} documented but not found in {}'.format(name, module_name)
