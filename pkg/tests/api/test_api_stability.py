import importlib
import inspect
import json
import os
from datetime import datetime

import pytest

import compas_mepoly

MODULES = [
    'compas_mepoly',
    'compas_mepoly.environments',
    'compas_mepoly.exceptions',
    'compas_mepoly.fitting',
    'compas_mepoly.networks',
    'compas_mepoly.polynomials',
    'compas_mepoly.training',
    'compas_mepoly.utilities',
]


def test_no_removed_names_from_any_package(compas_mepoly_api):
    generated_ver = parse_version(compas_mepoly_api['metadata']['compas_mepoly_version'])
    current_ver = parse_version(compas_mepoly.__version__)

    # Raise to indicate the API file needs to be regenerated
    if current_ver['major'] != generated_ver['major']:
        raise Exception('The compas_mepoly_api.json file needs to be regenerated for the current COMPAS_MEPOLY major version')

    mismatches = dict()
    for module_name in compas_mepoly_api['modules']:
        names_in_reference_version = compas_mepoly_api['modules'][module_name]
        names_in_current_version = set(get_names_in_module(module_name))

        for name in names_in_reference_version:
            if name not in names_in_current_version:
                mismatches.setdefault(module_name, []).append(name)

    assert len(mismatches) == 0, 'The following names are missing from the API: ' + str(mismatches)


def test_reference_covers_every_module(compas_mepoly_api):
    assert sorted(compas_mepoly_api['modules']) == sorted(MODULES)


@pytest.fixture
def compas_mepoly_api():
    with open(compas_mepoly_api_filename(), 'r') as f:
        return json.load(f)


def compas_mepoly_api_filename():
    return os.path.join(os.path.dirname(__file__), 'compas_mepoly_api.json')


def parse_version(ver):
    ver_major, ver_minor, ver_patch = ver.split('.')[0:3]
    return dict(major=ver_major, minor=ver_minor, patch=ver_patch)


def get_names_in_module(module_name):
    exceptions = ['absolute_import', 'division', 'print_function']
    module = importlib.import_module(module_name)
    all_names = module.__all__ if hasattr(module, '__all__') else dir(module)
    return sorted([i for i in all_names if not i.startswith('_') and i not in exceptions and not inspect.ismodule(getattr(module, i))])


if __name__ == '__main__':
    # Regenerate on every major release; minor releases only check that nothing was removed
    compas_mepoly_api = dict(
        metadata=dict(
            generated_on=datetime.now().strftime("%Y%m%d"),
            compas_mepoly_version=compas_mepoly.__version__,
        ),
        modules=dict()
    )

    for module_name in MODULES:
        compas_mepoly_api['modules'][module_name] = get_names_in_module(module_name)

    fname = compas_mepoly_api_filename()
    with open(fname, 'w') as f:
        json.dump(compas_mepoly_api, f, indent=2, sort_keys=True)

    print('Generated API file: ' + fname)
