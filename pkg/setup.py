"""Setup module for covqed."""

from setuptools import setup
from os import path

from covqed import __title__, __ver__

here = path.abspath(path.dirname(__file__))
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read().replace("\r\n", "\n")

setup(
    name=__title__,
    version=__ver__,
    description='Energy of physical states in covariant-gauge lattice QED',
    long_description=long_description,
    long_description_content_type='text/markdown',
    author='covqed developers',
    license='MIT',
    classifiers=[
        "Development Status :: 4 - Beta",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Scientific/Engineering :: Mathematics"
    ],
    keywords='qed gauge lattice fock commutator',
    packages=['covqed'],
    python_requires='>=3.8',
    install_requires=['numpy', 'scipy', 'sympy'],
    extras_require={'dev': ['coverage', 'pytest', 'sphinx']},
    package_data={'covqed': ['data/*']},
    entry_points={
        'console_scripts': [
            'covqed=covqed.__exec__:main'
        ]
    }
)
