import logging

from vstrips.format import setup_logging

setup_logging(level=logging.DEBUG, path=None)
