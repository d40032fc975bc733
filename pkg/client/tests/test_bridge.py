import copy
import json
import os
import re
import subprocess
import sys
import time

import pytest

from chunkselect_client import (
    ClientConfig,
    ProtocolError,
    RequestTimeoutError,
    SelectionClient,
    ServerError,
    SpawnError,
    ValidationError,
    spawn_local_server,
)

HAND_TRACE = [[[0.0]], [[0.1]], [[0.2]], [[5.0]]]
SERVER_CMD = [sys.executable, "-m", "chunkselect", "serve", "--transport", "stdio"]


def run_local_cli(candidates, seed=7, tmp_path=None):
    path = tmp_path / "batch.json"
    path.write_text(json.dumps({"candidates": candidates}))
    proc = subprocess.run(
        [sys.executable, "-m", "chunkselect", "select",
         "--input", str(path), "--seed", str(seed)],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


@pytest.fixture
def client():
    with spawn_local_server(ClientConfig(timeout=30.0), command=SERVER_CMD) as handle:
        yield handle


class TestSelectRemote:
    def test_hand_trace_matches_local_cli(self, client, tmp_path):
        local = run_local_cli(HAND_TRACE, seed=7, tmp_path=tmp_path)
        index, chunk, diagnostics = client.select_remote(HAND_TRACE, {"seed": 7})
        assert index == local["selected_index"] == 1
        assert chunk == local["selected_chunk"] == [[0.1]]
        assert diagnostics == local["diagnostics"]

    def test_selected_chunk_is_value_identical(self, client):
        candidates = [[[0.125, -7.375]], [[0.1, 0.3]], [[1e-17, 2.0**-1030]]]
        index, chunk, _ = client.select_remote(candidates, {"seed": 1})
        assert chunk == candidates[index]

    def test_hundred_sequential_calls_stay_in_order(self, client):
        for i in range(100):
            # shift the outlier so the expected winner moves around
            candidates = [[[0.0]], [[0.1]], [[0.2]], [[5.0 + i]]]
            index, chunk, _ = client.select_remote(candidates, {"seed": i})
            assert client.last_request_id == f"req-{i + 1}"
            assert index == 1
            assert chunk == [[0.1]]

    def test_caller_array_is_not_mutated(self, client):
        candidates = [[[0.0, 1.0]], [[2.0, 3.0]]]
        snapshot = copy.deepcopy(candidates)
        client.select_remote(candidates)
        assert candidates == snapshot

    def test_empty_batch_rejected_before_sending(self, client):
        with pytest.raises(ValidationError, match="empty"):
            client.select_remote([])
        index, _, _ = client.select_remote(HAND_TRACE, {"seed": 7})
        assert index == 1

    @pytest.mark.parametrize(
        "bad",
        [
            [[[1.0]], [[1.0, 2.0]]],          # ragged dims across candidates
            [[[1.0]], [[float("nan")]]],      # non-finite
            [[["x"]]],                        # non-numeric
            [[[]]],                           # empty rows
            42,                               # not a sequence
        ],
    )
    def test_client_side_validation(self, client, bad):
        with pytest.raises(ValidationError):
            client.select_remote(bad)

    def test_unknown_override_rejected_locally(self, client):
        with pytest.raises(ValidationError, match="beam"):
            client.select_remote(HAND_TRACE, {"beam": 2})

    def test_server_error_is_typed(self, client):
        with pytest.raises(ServerError) as err:
            client.select_remote(HAND_TRACE, {"tau": -1.0})
        assert err.value.code == "validation_error"


class TestLifecycle:
    def test_shutdown_leaves_no_orphan(self):
        handle = spawn_local_server(command=SERVER_CMD)
        pid = handle._transport.pid
        index, _, _ = handle.select_remote(HAND_TRACE, {"seed": 7})
        assert index == 1
        handle.close()
        assert handle._transport.returncode is not None
        with pytest.raises(ProcessLookupError):
            os.kill(pid, 0)

    def test_spawn_failure(self):
        with pytest.raises(SpawnError):
            spawn_local_server(command=["/nonexistent/selector-server"])

    def test_default_overrides_applied(self):
        config = ClientConfig(timeout=30.0, overrides={"tau": 10.0})
        with spawn_local_server(config, command=SERVER_CMD) as handle:
            _, _, diagnostics = handle.select_remote(HAND_TRACE)
            assert diagnostics["unimodal"] is True


class TestHostileServers:
    def test_garbage_response_raises_protocol_error(self):
        fake = [sys.executable, "-c",
                "import sys\nfor _ in sys.stdin: print('not json', flush=True)"]
        with spawn_local_server(ClientConfig(timeout=10.0), command=fake) as handle:
            with pytest.raises(ProtocolError, match="undecodable"):
                handle.select_remote(HAND_TRACE)

    def test_silent_server_times_out(self):
        fake = [sys.executable, "-c",
                "import sys, time\nsys.stdin.readline()\ntime.sleep(60)"]
        start = time.monotonic()
        with spawn_local_server(ClientConfig(timeout=0.8), command=fake) as handle:
            with pytest.raises(RequestTimeoutError):
                handle.select_remote(HAND_TRACE)
        assert time.monotonic() - start < 10.0

    def test_mismatched_id_raises_protocol_error(self):
        fake = [sys.executable, "-c",
                "import sys\nfor _ in sys.stdin: print('{\"id\": \"wrong\", "
                "\"selected_index\": 0, \"selected_chunk\": [[0.0]]}', flush=True)"]
        with spawn_local_server(ClientConfig(timeout=10.0), command=fake) as handle:
            with pytest.raises(ProtocolError, match="does not match"):
                handle.select_remote(HAND_TRACE)


class TestTcpTransport:
    @pytest.fixture
    def tcp_server(self):
        proc = subprocess.Popen(
            [sys.executable, "-m", "chunkselect", "serve",
             "--transport", "tcp", "--port", "0"],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.PIPE,
            text=True,
        )
        line = proc.stderr.readline()
        match = re.search(r"listening on ([\d.]+):(\d+)", line)
        assert match, f"unexpected server banner: {line!r}"
        yield match.group(1), int(match.group(2))
        proc.terminate()
        proc.wait(timeout=10)

    def test_tcp_round_trip_matches_cli(self, tcp_server, tmp_path):
        host, port = tcp_server
        local = run_local_cli(HAND_TRACE, seed=7, tmp_path=tmp_path)
        config = ClientConfig(transport="tcp", host=host, port=port, timeout=30.0)
        with SelectionClient(config) as handle:
            index, chunk, diagnostics = handle.select_remote(HAND_TRACE, {"seed": 7})
        assert index == local["selected_index"]
        assert chunk == local["selected_chunk"]
        assert diagnostics == local["diagnostics"]

    def test_tcp_sequential_order(self, tcp_server):
        host, port = tcp_server
        config = ClientConfig(transport="tcp", host=host, port=port, timeout=30.0)
        with SelectionClient(config) as handle:
            for i in range(25):
                index, _, _ = handle.select_remote(HAND_TRACE, {"seed": i})
                assert index == 1
            assert handle.last_request_id == "req-25"
