#!/usr/bin/env python

import os

# Always prefer setuptools over distutils
from setuptools import find_packages, setup

try:
    import builtins
except ImportError:
    import __builtin__ as builtins

# https://packaging.python.org/guides/single-sourcing-package-version/
# http://blog.ionelmc.ro/2014/05/25/python-packaging/

_PATH_ROOT = os.path.dirname(__file__)
builtins.__WEATHER_FILTER_SETUP__: bool = True

import weather_filter  # noqa: E402
from weather_filter.setup_tools import _load_readme_description, _load_requirements  # noqa: E402


def _prepare_extras():
    extras = {
        'test': _load_requirements(path_dir=os.path.join(_PATH_ROOT, 'requirements'), file_name='test.txt'),
    }
    extras['dev'] = extras['test']
    return extras


setup(
    name='weather-filter',
    version=weather_filter.__version__,
    description=weather_filter.__docs__,
    author=weather_filter.__author__,
    author_email=weather_filter.__author_email__,
    url=weather_filter.__homepage__,
    license=weather_filter.__license__,
    packages=find_packages(exclude=['tests', 'tests.*']),
    long_description=_load_readme_description(_PATH_ROOT),
    long_description_content_type='text/markdown',
    include_package_data=True,
    zip_safe=False,
    keywords=['radar', 'lidar', 'weather', 'link budget', 'sensor model', 'autonomous driving'],
    python_requires='>=3.8',
    setup_requires=['wheel'],
    install_requires=_load_requirements(_PATH_ROOT),
    extras_require=_prepare_extras(),
    entry_points={
        'console_scripts': ['weather-filter=weather_filter.cli:main'],
    },
    classifiers=[
        'Environment :: Console',
        'Natural Language :: English',
        # How mature is this project? Common values are
        #   3 - Alpha, 4 - Beta, 5 - Production/Stable
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Scientific/Engineering :: Information Analysis',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
    ],
)
