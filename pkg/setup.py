import os
from importlib import import_module

from setuptools import setup


basedir = os.path.abspath(os.path.dirname(__file__) or '.')
README = os.path.join(basedir, 'README.rst')

# required data

package_name = 'wavesidf'
NAME = package_name
SUMMARY = ('Numerical checks of the source integral decomposition of the '
           'wave equation.')
AUTHOR = 'Canonical Landscape team'
LICENSE = 'LGPLv3'

DESCRIPTION = ''
if os.path.exists(README):
    with open(README) as readme_file:
        DESCRIPTION = readme_file.read()

# dymanically generated data

VERSION = import_module(package_name).__version__

# set up packages

exclude_dirs = [
        'tests',
        ]

PACKAGES = []
for path, dirs, files in os.walk(package_name):
    if '__init__.py' not in files:
        continue
    path = path.split(os.sep)
    if path[-1] in exclude_dirs:
        continue
    PACKAGES.append('.'.join(path))

# dependencies

DEPS = [
        'twisted',      # option parsing and failure logging
        'PyYAML',       # field and quadrature documents
        'numpy',
        ]
TESTING_DEPS = [
        'fixtures',
        'testtools',
        'testresources',
        'hypothesis',
        'scipy',        # reference integrals and gamma values
        ]


if __name__ == '__main__':
    setup(name=NAME,
          version=VERSION,
          author=AUTHOR,
          license=LICENSE,
          description=SUMMARY,
          long_description=DESCRIPTION,
          packages=PACKAGES,
          python_requires='>=3.6',
          install_requires=DEPS,
          tests_require=TESTING_DEPS,
          extras_require={'test': TESTING_DEPS},
          entry_points={
              'console_scripts': ['wavesidf = wavesidf.cli:console'],
              },
          )
