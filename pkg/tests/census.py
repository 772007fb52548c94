"""Synthetic site records matching the published installation counts.

Only the Akeeba count (4,646) and the totals are published; the other counts
are chosen so each reproduces its published percentage of 7,797.
"""

from joomaudit.report import SiteRecord

WITH_EXTENSIONS = 7797
JOOMLA = 19047
REACHABLE = 932000  # 93.2% of one million
HOSTS = 1000000

# (name, count, published share)
ROWS = [
    ("Akeeba Backup", 4646, "59.6"),
    ("AcyMailing", 2682, "34.4"),
    ("Advanced Module Manager", 967, "12.4"),
    ("JEvents", 928, "11.9"),
    ("eXtplorer", 889, "11.4"),
    ("Phoca Gallery", 366, "4.7"),
    ("Community Builder", 281, "3.6"),
    ("Ark Editor", 242, "3.1"),
    ("Ozio Gallery", 133, "1.7"),
    ("Sigplus", 94, "1.2"),
]


def records(include_unreachable=True):
    # lay the counts end to end around a ring of hosts; their sum exceeds
    # 7,797, so every host gets at least one extension and none gets one twice
    names = [set() for _ in range(WITH_EXTENSIONS)]
    start = 0
    for name, count, _ in ROWS:
        for i in range(start, start + count):
            names[i % WITH_EXTENSIONS].add(name)
        start += count
    assert all(names)
    out = [SiteRecord("j%d.test" % i, True, frozenset(n)) for i, n in enumerate(names)]
    plain_joomla = SiteRecord("plain.test", True)
    out.extend([plain_joomla] * (JOOMLA - WITH_EXTENSIONS))
    out.extend([SiteRecord("other.test")] * (REACHABLE - JOOMLA))
    if include_unreachable:
        out.extend([SiteRecord("down.test", error="HostUnreachable")] * (HOSTS - REACHABLE))
    return out
