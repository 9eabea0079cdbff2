# -*- coding: utf-8 -*-

"""Sphinx configuration for frac_ham."""

import os
import re
import sys

sys.path.insert(0, os.path.abspath('../../src'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.viewcode',
    'sphinx.ext.mathjax',
    'sphinx_click.ext',
    'sphinx_autodoc_typehints',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'frac_ham'
copyright = '2020, The frac_ham developers'
author = 'The frac_ham developers'

# The full version, including the pre-release tag
release = '0.1.0-dev'

parsed_version = re.match(
    r'(?P<major>\d+)\.(?P<minor>\d+)\.(?P<patch>\d+)(?:-(?P<release>[0-9A-Za-z-]+))?',
    release,
)
version = parsed_version.expand(r'\g<major>.\g<minor>.\g<patch>')

if parsed_version.group('release'):
    tags.add('prerelease')  # noqa: F821

language = None
exclude_patterns = []
pygments_style = 'sphinx'
todo_include_todos = True

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = []
htmlhelp_basename = 'frac_ham_doc'

# -- Options for other builders -------------------------------------------

latex_documents = [
    (master_doc, 'frac_ham.tex', 'frac_ham Documentation', author, 'manual'),
]

man_pages = [
    (master_doc, 'frac_ham', 'frac_ham Documentation', [author], 1),
]

texinfo_documents = [
    (
        master_doc, 'frac_ham', 'frac_ham Documentation', author, 'frac_ham',
        'Two solutions of perturbed fractional Hamiltonian systems.', 'Miscellaneous',
    ),
]

# -- Extensions -----------------------------------------------------------

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

autodoc_member_order = 'bysource'
autoclass_content = 'both'

if os.environ.get('READTHEDOCS', None):
    tags.add('readthedocs')  # noqa: F821
