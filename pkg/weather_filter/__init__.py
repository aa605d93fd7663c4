"""Root package info."""

import os

__version__ = '0.1.0'
__author__ = 'Weather Filter contributors'
__author_email__ = 'weather-filter@users.noreply.github.com'
__license__ = 'Apache-2.0'
__copyright__ = f'Copyright (c) 2024, {__author__}'
__homepage__ = 'https://github.com/weather-filter/weather-filter'
__docs__ = "Weather Filter predicts how far radar and lidar still detect a pedestrian in rain and fog."
__long_doc__ = """
What is it?
-----------
A physical attenuation and link-budget model of automotive radar and lidar, extended by a few empirical
tuning coefficients that are fitted to measured detection ranges. The fitted model is the weather filter,
the plain physical model with every coefficient at one is the baseline.

What is in it?
--------------
Attenuation and received power models, a range solver, detection statistics on point-cloud frames,
the calibration of the tuning coefficients and a command line tool emitting CSV for external plotting.
"""

_PACKAGE_ROOT = os.path.dirname(__file__)
_PROJECT_ROOT = os.path.dirname(_PACKAGE_ROOT)

try:
    # This variable is injected in the __builtins__ by the build process.
    # It used to enable importing subpackages when the dependencies are not installed yet.
    _ = None if __WEATHER_FILTER_SETUP__ else None
except NameError:
    __WEATHER_FILTER_SETUP__: bool = False

if __WEATHER_FILTER_SETUP__:  # pragma: no cover
    import sys

    sys.stdout.write(f'Partial import of `{__name__}` during the build process.\n')
else:
    from weather_filter import calibration, datasets, metrics, models, utils

    __all__ = [
        'calibration',
        'datasets',
        'metrics',
        'models',
        'utils',
    ]
