__author__ = 'drsim developers'
__version__ = '0.1.0'
