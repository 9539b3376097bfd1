# -*- coding: utf-8 -*-
#
# covqed documentation build configuration file.

import sys
import os

sys.path.insert(0, os.path.abspath('..'))

from covqed import __ver__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.todo',
    'sphinx.ext.viewcode'
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'covqed'
copyright = '2026, covqed developers'
author = 'covqed developers'

release = __ver__
version = __ver__

exclude_patterns = ['_build', 'build']
pygments_style = 'sphinx'
todo_include_todos = True

html_theme = 'bizstyle'
htmlhelp_basename = 'covqeddoc'

latex_documents = [
    (master_doc, 'covqed.tex', 'covqed Documentation', author, 'manual'),
]

man_pages = [
    (master_doc, 'covqed', 'covqed Documentation', [author], 1)
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
    'scipy': ('https://docs.scipy.org/doc/scipy', None),
    'sympy': ('https://docs.sympy.org/latest', None)
}

autodoc_default_options = {'members': True, 'private-members': True}
