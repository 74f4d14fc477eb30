# -*- coding: utf-8 -*-
"""
Output locations for archives and tables.
"""

from typing import Optional, Union
from pathlib import Path

from .utils import OUTPUT_DIR


def set_base_dir(DEFAULT_BASE_DIR: Path = OUTPUT_DIR, base_dir: Optional[Union[str, Path]] = None) -> Path:
    if base_dir is None:
        _base_dir = Path(DEFAULT_BASE_DIR)
    else:
        _base_dir = Path(base_dir)

    if not _base_dir.exists():
        _base_dir.mkdir(mode=0o755, parents=True)

    return _base_dir


def prepare_output_file(path: Optional[Union[str, Path]], default_name: str) -> Path:
    # no path given: file goes to the configured output directory
    if path is None:
        return set_base_dir() / default_name
    path = Path(path)
    set_base_dir(base_dir=path.parent)
    return path
