#!/usr/bin/env python3
"""Onofri Lab: меню без аргументів, CLI з аргументами."""
import sys

from onofri_lab.__main__ import launch

if __name__ == "__main__":
    sys.exit(launch())
