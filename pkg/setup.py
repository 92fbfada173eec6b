from setuptools import setup

setup(
    name='mapredsched',
    version='0.1.0',
    packages=['mapredsched'],
    description="LP-guided scheduling of map/reduce jobs on heterogeneous clusters, with baselines and a simulator.",
    keywords='scheduling mapreduce linear-programming heterogeneous'.split(),
    python_requires='>=3.7',
    install_requires=['numpy'],
    extras_require={'tests': ['pytest']},
    entry_points={'console_scripts': ['mapredsched=mapredsched.cli:main']},
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
)
