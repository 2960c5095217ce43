from setuptools import setup, find_packages

with open('requirements.txt') as f:
    requirements = [line for line in f.read().splitlines() if line and not line.startswith('#')]

setup(
    name='latent_feature_clustering',
    version='0.1.0',
    description='Autoencoder latent spaces shaped by clustering and contrastive losses, projected and scored by silhouette',
    author='Latent Feature Clustering Team',
    packages=find_packages(where='src'),
    package_dir={'': 'src'},
    install_requires=requirements,
    extras_require={
        'dev': [
            'pytest>=7.3.0',
            'flake8>=6.0.0',
            'black>=23.3.0',
        ],
    },
    entry_points={
        'console_scripts': [
            'lfc=latent_feature_clustering.main:run',
        ],
    },
    python_requires='>=3.9',
)
