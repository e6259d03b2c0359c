# -*- coding: utf-8 -*-
#
# drsim documentation build configuration file

import os
import sys

sys.path.insert(0, os.path.dirname(os.getcwd()))

import drsim

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']
templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'drsim'
copyright = u'2026, drsim developers'
version = drsim.__version__
release = drsim.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'default'
htmlhelp_basename = 'drsimdoc'

latex_documents = [
    ('index', 'drsim.tex', u'drsim Documentation', u'drsim developers', 'manual'),
]
man_pages = [
    ('index', 'drsim', u'drsim Documentation', [u'drsim developers'], 1)
]
