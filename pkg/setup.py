from setuptools import find_packages, setup

exec(open("zkucb/version.py").read())

setup(
    name='zkucb',
    version=__version__,
    packages=find_packages(include=['zkucb', 'zkucb.*']),
    license='MIT',
    entry_points={'console_scripts': ['zkucb=zkucb.cli:main']},
)
