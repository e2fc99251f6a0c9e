# coding: utf-8
import leraylab
import sys

is_tty = (sys.stdin.isatty()) and (sys.stdout.isatty())

LOGOS = {}
LOGOS['leraylab', True] = """
  \x1b[32m╻  ┏━╸┏━┓┏━┓╻ ╻\x1b[34m╻  ┏━┓┏┓ \x1b[0m  version {0}
  \x1b[32m┃  ┣╸ ┣┳┛┣━┫┗┳┛\x1b[34m┃  ┣━┫┣┻┓\x1b[0m  self-similar fractional Navier-Stokes lab
  \x1b[32m┗━╸┗━╸╹┗╸╹ ╹ ╹ \x1b[34m┗━╸╹ ╹┗━┛\x1b[0m
"""

LOGOS['leraylab', False] = """
  ╻  ┏━╸┏━┓┏━┓╻ ╻╻  ┏━┓┏┓   version {0}
  ┃  ┣╸ ┣┳┛┣━┫┗┳┛┃  ┣━┫┣┻┓  self-similar fractional Navier-Stokes lab
  ┗━╸┗━╸╹┗╸╹ ╹ ╹ ┗━╸╹ ╹┗━┛
"""


def logo(what_for="leraylab", color=is_tty):
    version = leraylab.__version__

    print(LOGOS[what_for, color].format(version))
