from setuptools import setup, find_packages

MODULE_NAME = "vagreeks"

setup(
    name=MODULE_NAME,
    version='0.1',
    description='Monte Carlo delta and gamma of GMWB variable annuities '
                'under Heston and CIR dynamics',
    long_description=open("README.rst").read(),
    keywords='monte carlo greeks variable annuity heston',
    packages=find_packages(exclude=["tests"]),
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Financial and Insurance Industry',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3',
    ],
    license='APACHE',
    include_package_data=True,
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.6',
        'joblib>=1.0',
        'pandas>=1.3',
        'h5py>=3.0',
    ],
    tests_require=[
        'pytest',
        'pytest-cov',
        'mock'
    ],
    zip_safe=False,
    entry_points={'console_scripts': ["va-greeks = vagreeks.app:main"]}
)
