from setuptools import setup

package_name = 'temporal_encoder'
submodules = 'temporal_encoder/submodules'

setup(
    name='temporal-encoder',
    version='0.1.0',
    packages=[package_name, submodules.replace('/', '.')],
    package_data={package_name: ['presets/*.yaml']},
    python_requires='>=3.8',
    install_requires=[
        'setuptools',
        'numpy>=1.20',
        'scipy>=1.8',
        'pandas>=1.3',
        'PyYAML>=5.4',
    ],
    extras_require={
        'test': ['pytest', 'flake8', 'pydocstyle'],
    },
    zip_safe=True,
    maintainer='temporal-encoder authors',
    maintainer_email='temporal-encoder@users.noreply.github.com',
    description='Encoder embedding and temporal dynamics of time-series graphs',
    license='Apache-2.0',
    tests_require=['pytest', 'flake8', 'pydocstyle'],
    entry_points={
        'console_scripts': [
            'temporal-encoder=temporal_encoder.cli:main'
        ],
    },
)
