import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest


class StubLLM:
    """Chat-completion endpoint on localhost answering from a scripted list of (status, content) pairs.

    Once the script runs out, the last entry repeats. Content ``None`` echoes
    the user message back.
    """

    def __init__(self, script):
        self.script = list(script)
        self.requests = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = json.loads(self.rfile.read(int(self.headers["Content-Length"])).decode("utf-8"))
                stub.requests.append({"path": self.path, "headers": dict(self.headers), "body": body})
                i = min(len(stub.requests) - 1, len(stub.script) - 1)
                status, content = stub.script[i]
                if content is None:
                    content = body["messages"][-1]["content"]
                if status == 200 and not isinstance(content, dict):
                    payload = {"choices": [{"message": {"role": "assistant", "content": content}}]}
                else:
                    payload = content if isinstance(content, dict) else {"error": content}
                raw = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(raw)))
                self.end_headers()
                self.wfile.write(raw)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def base_url(self):
        return f"http://127.0.0.1:{self.server.server_address[1]}/v1"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def stub_llm():
    servers = []

    def make(script):
        s = StubLLM(script).__enter__()
        servers.append(s)
        return s

    yield make
    for s in servers:
        s.__exit__(None, None, None)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
