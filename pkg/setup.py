import setuptools
import pathlib


setuptools.setup(
    name='latticeflow',
    version='0.1.0',
    description='Numerical lab for pointwise equidistribution of diagonal flows',
    long_description=pathlib.Path('README.md').read_text(),
    long_description_content_type='text/markdown',
    packages=['latticeflow', 'latticeflow.common'],
    package_data={'latticeflow': ['configs.yaml']},
    entry_points={'console_scripts': ['latticeflow=latticeflow.run:main']},
    install_requires=[
        'numpy', 'scipy', 'sympy', 'pandas>=1.5', 'ruamel.yaml',
        'cloudpickle'],
    extras_require={'test': ['pytest']},
    python_requires='>=3.8',
    classifiers=[
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
