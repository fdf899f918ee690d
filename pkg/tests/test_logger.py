import logging
from datetime import datetime

import pytest

from zzsim.shared.logger import DEFAULT_RUN, LOG_FORMAT, RunLogHandler


@pytest.fixture
def run_logger(tmp_path):
    handler = RunLogHandler(tmp_path / 'logs')
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger = logging.getLogger('zzsim.tests.run')
    logger.setLevel(logging.INFO)
    logger.propagate = False
    logger.addHandler(handler)
    yield logger, handler
    logger.removeHandler(handler)
    handler.close()


def today() -> str:
    return f"{datetime.now():%Y_%m_%d}"


def test_logs_dir_is_created_on_first_record(tmp_path, run_logger):
    logger, handler = run_logger
    assert not (tmp_path / 'logs').exists()
    logger.info('first')
    path = tmp_path / 'logs' / f"{DEFAULT_RUN}_{today()}.log"
    assert handler.log_path() == path
    assert 'first' in path.read_text(encoding='utf-8')


def test_each_run_gets_its_own_file(tmp_path, run_logger):
    logger, handler = run_logger
    static_path = handler.start_run('static-zz')
    logger.info('zeta computed')
    cz_path = handler.start_run('cz')
    logger.warning('gap flagged')

    assert static_path.name == f"static-zz_{today()}.log"
    assert cz_path.name == f"cz_{today()}.log"
    static_text = static_path.read_text(encoding='utf-8')
    cz_text = cz_path.read_text(encoding='utf-8')
    assert ' - static-zz - zzsim.tests.run - INFO - zeta computed' in static_text
    assert 'gap flagged' not in static_text
    assert ' - cz - zzsim.tests.run - WARNING - gap flagged' in cz_text


def test_repeated_run_appends(run_logger):
    logger, handler = run_logger
    path = handler.start_run('spectrum')
    logger.info('one')
    handler.start_run('spectrum')
    logger.info('two')
    lines = path.read_text(encoding='utf-8').splitlines()
    assert [line.rsplit(' - ', 1)[1] for line in lines] == ['one', 'two']
