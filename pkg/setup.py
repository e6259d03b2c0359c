#!/usr/bin/env python

import os
import sys

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup


if sys.argv[-1] == 'publish':
    os.system('python setup.py sdist upload')
    sys.exit()

readme = open('README.rst').read()
doclink = """
Documentation
-------------

The full documentation is in the docs/ folder."""
history = open('HISTORY.rst').read().replace('.. :changelog:', '')

setup(
    name='drsim',
    version='0.1.0',
    description='Real-time pricing for demand response events on distribution feeders: '
                'primal-dual solvers, simulated customer response and error bounds.',
    long_description=readme + '\n\n' + doclink + '\n\n' + history,
    author='drsim developers',
    packages=[
        'drsim', 'drsim.Feeder', 'drsim.Pricing', 'drsim.Analysis', 'drsim.Scenarios'
    ],
    package_dir={'drsim': 'drsim'},
    package_data={'drsim': ['PackageData/*.yaml']},
    include_package_data=True,
    install_requires=[
        'numpy', 'scipy', 'pandas>=1.5', 'PyYAML', 'joblib'
    ],
    entry_points={'console_scripts': ['drsim = drsim.cli:main']},
    license='MIT',
    zip_safe=False,
    keywords='drsim',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
    ],
)
