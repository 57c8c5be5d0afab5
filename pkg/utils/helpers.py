"""
Helper utilities for gkmquiver
"""

import io
import time
from typing import Callable, Any, Dict, List, Sequence
from functools import wraps

import pandas as pd

from utils.logger import setup_logger

logger = setup_logger(__name__)


def timed(label: str = None):
    """
    Log the wall time of a call at INFO level

    Args:
        label: Text used in the log line (defaults to the function name)
    """
    def decorator(func: Callable) -> Callable:
        name = label or func.__name__

        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start = time.perf_counter()
            result = func(*args, **kwargs)
            elapsed = time.perf_counter() - start
            size = f" ({len(result)} items)" if hasattr(result, "__len__") else ""
            logger.info(f"{name} finished in {elapsed:.3f}s{size}")
            return result
        return wrapper
    return decorator


def rows_to_csv(rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
    """Render rows as CSV with a fixed column order and '\\n' line endings"""
    df = pd.DataFrame(rows, columns=list(columns))
    buffer = io.StringIO()
    df.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()
