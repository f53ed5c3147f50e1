"""Figure renderers for the spherepts outputs.

Pure renderers: every number drawn comes from the input files; the scripts
validate the documented CSV schemas and refuse anything else.  Rendering is
headless and the output file appears atomically or not at all.
"""

__version__ = "0.1.0"
