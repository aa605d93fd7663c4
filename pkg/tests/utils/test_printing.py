import pytest

from weather_filter.utils.printing import dicts_to_table, format_cell


@pytest.mark.parametrize(
    "value, fcode, expected", [
        (3.14159, '.2f', '3.14'),
        (None, '.2f', 'none'),
        ('radar', '.2f', 'radar'),
        (-0.5, '+.3f', '-0.500'),
    ]
)
def test_format_cell(value, fcode, expected):
    assert format_cell(value, fcode) == expected


def test_table_layout():
    table = dicts_to_table(
        [{'rain_mmh': 16.0, 'residual_m': 0.25}, {'rain_mmh': 98.0, 'residual_m': None}],
        fcodes={'rain_mmh': 'g', 'residual_m': '+.2f'},
        header_names={'rain_mmh': 'rain'},
        missing='-',
    )
    assert table.splitlines() == [
        'rain│residual_m',
        '────┼──────────',
        '  16│     +0.25',
        '  98│         -',
    ]


def test_table_key_order():
    table = dicts_to_table([{'a': 1, 'b': 2}], keys=['b', 'a'])
    assert table.splitlines()[0] == 'b│a'


def test_empty_table():
    assert dicts_to_table([], keys=['d_p']).splitlines() == ['d_p', '───']
    with pytest.raises(ValueError):
        dicts_to_table([])
