__title__ = 'compas_mepoly'
__description__ = 'Maximum-entropy polynomial distributions and policies for the COMPAS Framework'
__url__ = 'https://github.com/compas-dev/compas_mepoly'
__version__ = '0.1.0'
__author__ = 'Gramazio Kohler Research'
__author_email__ = 'gramaziokohler@arch.ethz.ch'
__license__ = 'MIT license'
__copyright__ = 'Copyright 2026 Gramazio Kohler Research'
