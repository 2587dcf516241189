"""
setup script for hermdeform
Install with: pip install -e .[test]
"""
from setuptools import find_packages, setup

from hermdeform import __version__

setup(
    name='hermdeform',
    version=__version__,
    description='変形 Hermite 多項式族 M / C / W と測度 D の厳密計算',
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.10',
    install_requires=[],
    extras_require={
        'test': [
            'pytest>=7.0',
            'hypothesis>=6.0',
            'sympy>=1.12',
        ],
    },
    entry_points={
        'console_scripts': [
            'hermdeform=hermdeform.main:main',
        ],
    },
)
