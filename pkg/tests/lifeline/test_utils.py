from unittest.mock import patch
import errno

import pytest

from lifeline import exceptions, utils


def test_union():
    assert utils.union() == 0.0
    assert utils.union(0.5) == 0.5
    assert utils.union(0.5, 0.5) == pytest.approx(0.75)
    assert utils.union(0.2, 1.0, 0.3) == 1.0


def test_check_probability():
    assert utils.check_probability(0) == 0.0
    assert utils.check_probability(1) == 1.0
    with pytest.raises(exceptions.InvalidProbability):
        utils.check_probability(1.5)
    with pytest.raises(exceptions.InvalidProbability):
        utils.check_probability(-0.1)


def test_parse_chain():
    assert utils.parse_chain('a -> b') == [('a', 'b')]
    assert utils.parse_chain('a->b ->  c') == [('a', 'b'), ('b', 'c')]
    with pytest.raises(ValueError):
        utils.parse_chain('a')
    with pytest.raises(ValueError):
        utils.parse_chain('a -> -> c')


@patch('lifeline.utils.os')
def test_makedirs(mock_os):

    def mock_makedirs(path):
        err = OSError()
        err.errno = errno.EEXIST
        raise err

    mock_os.path.isdir.return_value = True
    mock_os.makedirs = mock_makedirs
    utils.makedirs('/foo')

    mock_os.path.isdir.return_value = False
    with pytest.raises(OSError):
        utils.makedirs('/foo')

    def mock_makedirs(path):
        err = OSError()
        err.errno = 'other'
        raise err

    mock_os.makedirs = mock_makedirs
    mock_os.path.isdir.return_value = True
    with pytest.raises(OSError):
        utils.makedirs('/foo')
