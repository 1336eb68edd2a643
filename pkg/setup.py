from setuptools import setup, find_packages

setup(
    name='rankbreak',
    version='0.1.0',
    description='Wilcoxon- and CUSUM-type tests separating a mean shift from long-range dependence',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(where='.', exclude=('tests', 'tests.*')),
    classifiers=[
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Utilities',
    ],
    python_requires='>=3.10',
    install_requires=[
        'numpy>=1.23',
        'scipy>=1.9',
        'numba>=0.56',
        'pandas>=1.5',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': [
            'rankbreak=rankbreak.cli:main',
        ],
    },
)
