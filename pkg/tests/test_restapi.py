import importlib

import pytest

from fastapi.testclient import TestClient

NORMAL_MOMENTS = {'n': 10, 'sigma2': 1, 'mu': [1, 0, 3, 0, 15]}

@pytest.fixture(scope='module')
def client(tmp_path_factory):
    directory = tmp_path_factory.mktemp('restapi')
    path = directory / 'aee.ini'
    path.write_text("[logging]\ndir = {}\nshell = False\n".format(
        directory / 'logs'))

    with pytest.MonkeyPatch.context() as patch:
        patch.setenv('AEE_CONFIG', str(path))
        restapi = importlib.import_module('restapi')
    return TestClient(restapi.app)

def test_expand(client):
    response = client.get('/expand/one-biased/1', params={'lambda_form': True})
    assert response.status_code == 200
    payload = response.json()
    assert payload['test'] == 'one-biased'
    assert payload['q'][0]['text'] == '(1/6)*l3*(2*x^2 + 1)'

def test_expand_errors(client):
    assert client.get('/expand/one-sided/1').status_code == 400
    assert client.get('/expand/one-biased/9').status_code == 400

def test_eval(client):
    response = client.post('/eval', json={'test': 'one-biased',
        'moments': NORMAL_MOMENTS, 'x': [0.0, 1.0]})
    assert response.status_code == 200
    rows = response.json()
    assert rows[0]['terms'] == pytest.approx([0.5, 0.5, 0.5])
    assert rows[1]['usable_order'] == {'left': 2, 'right': 2}

def test_eval_quantile(client):
    response = client.post('/eval', json={'test': 'one-biased', 'order': 1,
        'moments': NORMAL_MOMENTS, 'p': [0.975]})
    assert response.status_code == 200
    row, = response.json()
    assert row['terms'][0] == pytest.approx(1.959964, abs=1e-5)

@pytest.mark.parametrize('body', [
    {'test': 'one-biased', 'moments': NORMAL_MOMENTS},
    {'test': 'one-biased', 'moments': NORMAL_MOMENTS, 'p': [1.0]},
    {'test': 'one-biased', 'order': 0, 'moments': NORMAL_MOMENTS, 'x': [0]},
    {'test': 'one-moderated', 'moments': NORMAL_MOMENTS, 'x': [0]},
    {'test': 'welch-biased', 'moments': NORMAL_MOMENTS, 'x': [0]},
])
def test_eval_rejects(client, body):
    response = client.post('/eval', json=body)
    assert response.status_code == 400
    assert 'error' in response.json()

def test_diagnose_moderated(client):
    response = client.post('/diagnose', json={'test': 'one-moderated',
        'order': 1, 'moments': NORMAL_MOMENTS, 'd0': '4', 's02': '1'})
    assert response.status_code == 200
    left, right = response.json()
    assert left['side'] == 'left'
    assert len(right['per_term']) == 2
