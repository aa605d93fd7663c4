from typing import Any, Dict, List, Mapping, Optional, Sequence


def format_cell(value: Any, fcode: str = '', missing: str = 'none') -> str:
    """
    >>> format_cell(51.1086, '.2f'), format_cell(None), format_cell(float('inf'), '.2f')
    ('51.11', 'none', 'inf')
    """
    if value is None:
        return missing
    try:
        return f'{value:{fcode}}'
    except (TypeError, ValueError):
        return str(value)


def dicts_to_table(
    dicts: Sequence[Mapping[str, Any]],
    keys: Optional[List[str]] = None,
    fcodes: Optional[Dict[str, str]] = None,
    header_names: Optional[Dict[str, str]] = None,
    missing: str = 'none',
) -> str:
    """
    Render rows of dictionaries as a plain text table with right aligned columns.

    Args:
        dicts: rows, all sharing the columns in ``keys``
        keys: column order, defaults to the keys of the first row; mandatory for empty input
        fcodes: format code per column, eg ``{'residual': '+.3f'}``
        header_names: header per column instead of its key
        missing: text printed for ``None`` cells

    Example:

        >>> print(dicts_to_table([{'d': 21.0, 'n': 3}, {'d': 27.0, 'n': None}], fcodes={'d': '.1f'}))
           d│   n
        ────┼────
        21.0│   3
        27.0│none
    """
    if keys is None:
        if not dicts:
            raise ValueError('keys are mandatory on an empty list of rows')
        keys = list(dicts[0].keys())
    fcodes = fcodes or {}
    header_names = header_names or {}

    headers = [header_names.get(key, key) for key in keys]
    cells = [[format_cell(row.get(key), fcodes.get(key, ''), missing) for key in keys] for row in dicts]
    widths = [max([len(header)] + [len(line[i]) for line in cells]) for i, header in enumerate(headers)]

    lines = [
        '│'.join(f'{header:>{width}}' for header, width in zip(headers, widths)),
        '┼'.join('─' * width for width in widths),
    ]
    lines += ['│'.join(f'{cell:>{width}}' for cell, width in zip(line, widths)) for line in cells]
    return '\n'.join(lines)
