"""Local HTTP servers that imitate the hosts the crawler meets in the wild."""

import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

JOOMLA_FILES = {
    "robots.txt": b"# If the Joomla site is installed within a folder\n# eg www.example.com/joomla/\n"
    b"# robots.txt for Joomla! sites\nUser-agent: *\nDisallow: /administrator/\n",
    "administrator/manifests/files/joomla.xml": b'<?xml version="1.0"?>\n<extension type="file">\n'
    b"<name>files_joomla</name>\n<version>3.9.6</version>\n</extension>\n",
    "language/en-GB/en-GB.xml": b"<metafile><name>English (en-GB)</name><description>en-GB site language for Joomla"
    b"</description></metafile>\n",
}
AKEEBA_MANIFEST = b'<?xml version="1.0"?>\n<extension type="component"><name>Akeeba Backup</name></extension>\n'
SIGPLUS_JS = b"/* sigplus Image Gallery Plus initialization */\nwindow.sigplus = {};\n"
PARKED = b"<html><body><h1>This domain is parked</h1><p>Buy it now!</p></body></html>"


class Site:
    """Routing table plus request log; subclass or pass `routes`."""

    def __init__(self, routes=None, redirects=None, catch_all=None, drop_first=0, fail_status_first=0):
        self.routes = dict(routes or {})
        self.redirects = dict(redirects or {})
        self.catch_all = catch_all
        self.drop_first = drop_first
        self.fail_status_first = fail_status_first
        self.log = []  # (monotonic time, path, user agent)
        self.lock = threading.Lock()

    def hits(self, path=None):
        with self.lock:
            return sum(1 for _, p, _ in self.log if path is None or p == path)

    def respond(self, handler):
        with self.lock:
            self.log.append((time.monotonic(), handler.path, handler.headers.get("User-Agent")))
            n = len(self.log)
        if n <= self.drop_first:
            # hang up without a response: a transport failure for the client
            handler.close_connection = True
            handler.connection.shutdown(socket.SHUT_RDWR)
            return
        if n <= self.drop_first + self.fail_status_first:
            return handler.send(503, b"busy")
        if handler.path in self.redirects:
            return handler.send(302, b"", {"Location": self.redirects[handler.path]})
        if handler.path in self.routes:
            return handler.send(200, self.routes[handler.path])
        if self.catch_all is not None:
            return handler.send(200, self.catch_all)
        return handler.send(404, b"<html>Not Found</html>")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    disable_nagle_algorithm = True

    def do_GET(self):
        self.server.site.respond(self)

    def send(self, status, body, headers=None):
        self.send_response(status)
        for k, v in (headers or {}).items():
            self.send_header(k, v)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


class Server:
    def __init__(self, site):
        self.site = site
        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
        self.httpd.daemon_threads = True
        self.httpd.site = site
        self.thread = threading.Thread(target=self.httpd.serve_forever, args=(0.05,), daemon=True)

    @property
    def origin(self):
        return "http://127.0.0.1:%d/" % self.httpd.server_address[1]

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()


def joomla_routes(prefix="/", extras=True):
    routes = {prefix: b"<html><head><meta name='generator' content='Joomla! - Open Source Content Management'>"}
    routes.update({prefix + k: v for k, v in JOOMLA_FILES.items()})
    if extras:
        routes[prefix + "administrator/components/com_akeeba/akeeba.xml"] = AKEEBA_MANIFEST
        routes[prefix + "media/sigplus/js/initialization.js"] = SIGPLUS_JS
    return routes


def root_joomla():
    return Site(joomla_routes("/"))


def site_joomla():
    return Site(joomla_routes("/site/", extras=False), redirects={"/": "/site/"})


def soft404():
    return Site(catch_all=PARKED)


def static_site():
    return Site({"/": b"<html><body>Plain static site</body></html>", "/robots.txt": b"User-agent: *\n"})


def closed_port_origin():
    """An origin whose port refuses connections."""
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return "http://127.0.0.1:%d/" % port
