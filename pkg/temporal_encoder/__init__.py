# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Temporal encoder embedding and temporal dynamics for time-series graphs."""

__version__ = '0.1.0'
