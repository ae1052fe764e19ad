#!/usr/bin/env python
from setuptools import setup, find_packages

import lifeline


def read(file_name):
    return open(file_name).read()


setup(
    name='lifeline',
    version=lifeline.__version__,
    description='Probabilistic cascade of failures across interdependent '
                'lifeline networks',
    long_description=read('README.md'),
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={
        'lifeline': ['scenarios/*.yml', 'scenarios/calibration/*.yml'],
    },
    install_requires=[line for line in read('requirements.txt').splitlines()
                      if line],
    entry_points={
        'console_scripts': [
            'lifeline = lifeline.commands:run',
        ]
    }
)
