from setuptools import setup, find_packages
import os
from io import open


name = 'pymessenger'
requirements = ['six', 'future', 'numpy>=1.17', 'scipy>=1.6', 'pandas', 'pydantic>=2']

__version__ = "Undefined"
for line in open('{}/__init__.py'.format(name.lower())):
    if line.startswith('__version__'):
        exec(line.strip())

here = os.path.abspath(os.path.dirname(__file__))

# Get the long description from the README file
with open(os.path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name=name,

    version=__version__,

    description='Cluster decomposition, messenger episodes and a kinematical messenger model for N-body scattering',
    long_description=long_description,
    keywords=['n-body, celestial mechanics, cluster decomposition, poincare surface'],

    license='MIT',

    classifiers=[
         'Development Status :: 3 - Alpha',
         'Environment :: Console',
         'Intended Audience :: Science/Research',
         'Topic :: Scientific/Engineering :: Physics',
         'Topic :: Scientific/Engineering :: Astronomy',
         'License :: OSI Approved :: MIT License',
         'Programming Language :: Python :: 3',
         'Programming Language :: Python :: 3.8',
         'Programming Language :: Python :: 3.9',
         'Programming Language :: Python :: 3.10',
         'Programming Language :: Python :: 3.11',
         ],

    packages=find_packages(exclude=['tests']),
    python_requires='>=3.8',
    install_requires=requirements,
    extras_require={
        'dev': ['sphinx', 'wheel', 'twine', 'fabric3'],
    },
    entry_points={
        'console_scripts': ['pymessenger = pymessenger.cli:main'],
    }
)
