# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

from pathlib import Path

import pydocstyle
from pydocstyle.violations import conventions
import pytest

ROOT = Path(__file__).resolve().parents[1]
IGNORE = ['D100', 'D101', 'D102', 'D103', 'D104', 'D105', 'D106', 'D107', 'D203', 'D212',
          'D404']


@pytest.mark.linter
@pytest.mark.pep257
def test_pep257():
    files = sorted(str(path) for folder in ('temporal_encoder', 'test')
                   for path in (ROOT / folder).rglob('*.py'))
    errors = list(pydocstyle.check(files, select=conventions.pep257 - set(IGNORE)))
    assert not errors, 'Found code style errors / warnings:\n' + '\n'.join(
        str(error) for error in errors)
