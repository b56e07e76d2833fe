# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import pathlib
import sys

sys.path.insert(0, pathlib.Path(__file__).parents[1].resolve().as_posix())

project = 'binentpy'
copyright = '2026, binentpy developers'
author = 'binentpy developers'
release = '0.1'
master_doc = 'index'

extensions = ['sphinx.ext.autodoc',
              'sphinx.ext.napoleon'
              ]
# Napoleon settings
napoleon_google_docstring = False
napoleon_numpy_docstring = True
napoleon_include_private_with_doc = False
napoleon_use_param = True
napoleon_use_rtype = True
napoleon_attr_annotations = True
templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

autodoc_mock_imports = ['yaml', 'scipy', 'pandas']

html_theme = 'nature'
