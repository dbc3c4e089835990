#!/usr/bin/env python3
"""Regenerate the miniature Posts dump used by the test suites.

Writes mini_dump.xml (~300 rows), mini_links.json, mini_gold.csv and
mini_config.json next to this script. Content is deterministic; re-running
reproduces the committed files byte for byte.
"""

import json
import random
from pathlib import Path
from xml.sax.saxutils import quoteattr

HERE = Path(__file__).resolve().parent
rng = random.Random(20130907)

ALIVE_LINKS = [
    "http://example.com/docs",
    "http://example.com/widgets",
    "https://wiki.example.org/guide",
]
DEAD_404 = "http://gone.example.net/page"
DEAD_TIMEOUT = "http://timeout.example.net/x"

THEMES = {
    "tables": ["table", "column", "row", "cell", "header", "sort", "editor", "viewer"],
    "buttons": ["button", "click", "listener", "event", "toolbar", "press", "selection", "menu"],
    "layout": ["layout", "grid", "resize", "margin", "widget", "composite", "spacing", "align"],
    "dialogs": ["dialog", "shell", "window", "modal", "wizard", "close", "prompt", "popup"],
    "images": ["image", "canvas", "draw", "paint", "color", "icon", "pixel", "graphic"],
}
VERBS = ["create", "add", "display", "update", "remove", "refresh", "configure", "center"]

next_id = 100
rows = []
gold = []  # (question_id, label) for every swt question


def take_id():
    global next_id
    next_id += 1
    return next_id


def date_for(n):
    return "2013-%02d-%02dT10:%02d:00.000" % (1 + n % 9, 1 + n % 27, n % 60)


def row(**attrs):
    parts = ["  <row"]
    for key, value in attrs.items():
        parts.append(" %s=%s" % (key, quoteattr(str(value))))
    parts.append(" />")
    rows.append("".join(parts))


def question(qid, title, body, tags, score, accepted=None):
    attrs = dict(Id=qid, PostTypeId=1, CreationDate=date_for(qid), Score=score,
                 Title=title, Body=body, Tags="".join("<%s>" % t for t in tags))
    if accepted is not None:
        attrs["AcceptedAnswerId"] = accepted
    row(**attrs)


def answer(aid, parent, body, score):
    row(Id=aid, PostTypeId=2, ParentId=parent, CreationDate=date_for(aid),
        Score=score, Body=body)


def theme_sentence(words, n):
    picked = [words[rng.randrange(len(words))] for _ in range(n)]
    return " ".join(picked)


def code_snippet(words):
    w = words[rng.randrange(len(words))]
    return "%s item = new %s();\nitem.set%s(%d);" % (
        w.capitalize(), w.capitalize(), w.capitalize(), rng.randrange(100))


def maybe_link(p):
    if rng.random() < p:
        return ' See <a href="%s">the docs</a>.' % ALIVE_LINKS[rng.randrange(len(ALIVE_LINKS))]
    return ""


QUESTION_TEMPLATES = [
    "<p>I am working with the %(a)s %(b)s in my swt application. "
    "How can I %(verb)s the %(c)s %(d)s near the %(e)s %(f)s?%(link)s</p>",
    "<p>My %(a)s keeps an old %(b)s %(c)s around. "
    "How do I %(verb)s the %(d)s %(e)s %(f)s cleanly?%(link)s</p>",
    "<p>Need every %(a)s %(b)s %(c)s refreshed on demand. "
    "How would one %(verb)s that %(d)s %(e)s %(f)s?%(link)s</p>",
    "<p>There should be a supported %(a)s %(b)s path here. "
    "How to %(verb)s a %(c)s %(d)s given an existing %(e)s %(f)s?%(link)s</p>",
]

FOLLOWUP_TEMPLATES = [
    "<p>So far the %(a)s %(b)s draft ignores %(c)s <code>%(d)s</code> spans.</p>",
    "<p>Currently the %(a)s %(b)s handles one %(c)s per %(d)s, nothing else.</p>",
    "<p>The legacy %(a)s %(b)s version redrew its %(c)s after each %(d)s.</p>",
]

ANSWER_TEMPLATES = [
    "<p>Call %(a)s %(b)s directly on the %(c)s %(d)s.%(link)s</p>",
    "<p>The %(a)s %(b)s API exposes a %(c)s hook for the %(d)s.%(link)s</p>",
    "<p>Register a %(a)s listener on the %(b)s %(c)s and refresh the %(d)s.%(link)s</p>",
    "<p>Wrap the %(a)s %(b)s inside a small %(c)s helper tied to the %(d)s.%(link)s</p>",
    "<p>Subclass the default %(a)s %(b)s and override its %(c)s %(d)s logic.%(link)s</p>",
]

NO_CODE_TEMPLATES = [
    "<p>Plain explanation around the %(a)s %(b)s, no snippet needed.</p>",
    "<p>This is purely a %(a)s configuration toggle next to the %(b)s.</p>",
]


def fills(words):
    return {key: words[rng.randrange(len(words))] for key in "abcdef"} | {
        "verb": VERBS[rng.randrange(len(VERBS))]}


def howto_question_body(words):
    values = fills(words)
    values["link"] = maybe_link(0.25)
    body = QUESTION_TEMPLATES[rng.randrange(len(QUESTION_TEMPLATES))] % values
    if rng.random() < 0.5:
        body += FOLLOWUP_TEMPLATES[rng.randrange(len(FOLLOWUP_TEMPLATES))] % fills(words)
    if rng.random() < 0.4:
        body += "<pre><code>%s</code></pre>" % code_snippet(words)
    return body


def answer_body(words, with_code=True, link=None):
    values = fills(words)
    values["link"] = maybe_link(0.2)
    body = ANSWER_TEMPLATES[rng.randrange(len(ANSWER_TEMPLATES))] % values
    if link:
        body += '<p>Background is at <a href="%s">this page</a>.</p>' % link
    if with_code:
        body += "<pre><code>%s</code></pre>" % code_snippet(words)
    else:
        body += NO_CODE_TEMPLATES[rng.randrange(len(NO_CODE_TEMPLATES))] % fills(words)
    return body


def add_answers(qid, words, count, best_has_code=True):
    """count answers; exactly one code answer when best_has_code is False."""
    ids = [take_id() for _ in range(count)]
    scores = sorted(rng.sample(range(0, 26), count), reverse=True)
    accepted = None
    for i, (aid, score) in enumerate(zip(ids, scores)):
        if best_has_code:
            has_code = i == 0 or rng.random() < 0.5
        else:
            has_code = i == count - 1  # only the lowest-scored answer has code
        answer(aid, qid, answer_body(words, with_code=has_code), score)
        if i == 0 and rng.random() < 0.6:
            accepted = aid
    return accepted


# ---- the five swt themes ----
for theme, words in THEMES.items():
    for i in range(12):
        qid = take_id()
        if i == 9:  # no "how" anywhere
            title = "%s %s keeps the old %s" % (theme, words[0], words[1])
            body = "<p>The %s should display a %s after a refresh. Any pointers?</p>" % (
                theme_sentence(words, 2), words[2])
            question(qid, title, body, ["swt", "java"], rng.randrange(0, 8))
            gold.append((qid, "other"))
            add_answers(qid, words, 1)
        elif i == 10:  # debug term in prose
            title = "How to deal with my %s %s" % (words[0], words[1])
            body = ("<p>There is a problem with the %s when I press %s. "
                    "How should this behave?</p>") % (theme_sentence(words, 2), words[3])
            question(qid, title, body, ["swt"], rng.randrange(0, 8))
            gold.append((qid, "other"))
            add_answers(qid, words, 1)
        elif i == 11:  # "error" inside the question's code block
            title = "How to get the %s %s right" % (words[0], words[2])
            body = ("<p>How do I wire the %s correctly?</p>"
                    "<pre><code>throw new %sError(); // stack trace</code></pre>") % (
                        theme_sentence(words, 2), words[0].capitalize())
            question(qid, title, body, ["swt"], rng.randrange(0, 8))
            gold.append((qid, "other"))
            add_answers(qid, words, 1)
        else:
            title = "How to %s a %s %s in swt" % (
                VERBS[(i + len(theme)) % len(VERBS)], words[i % len(words)],
                words[(i + 3) % len(words)])
            body = howto_question_body(words)
            if i == 4:
                # plural trap: "errors" must NOT trigger the exact-token rule
                body += "<p>My current draft never reports any errors, I just want it cleaner.</p>"
            question(qid, title, body, ["swt", "java"], rng.randrange(0, 15))
            gold.append((qid, "how_to_do_it"))
            count = 3 if i < 6 else 2
            add_answers(qid, words, count, best_has_code=(i % 4 != 1))

# ---- special swt cases ----
words = THEMES["tables"]

# long question (above the 1,300-character limit) - still how-to
qid = take_id()
filler = "Each table row repaints every column cell and sorts the header again. " * 24
question(qid, "How to render a very large table", "<p>How can I render this? %s</p>" % filler,
         ["swt"], 9)
gold.append((qid, "how_to_do_it"))
add_answers(qid, words, 2)

# how-to whose only answer has no code
qid = take_id()
question(qid, "How to pick a sorter for the table viewer",
         "<p>How do I pick the right %s?</p>" % theme_sentence(words, 2), ["swt"], 7)
gold.append((qid, "how_to_do_it"))
answer(take_id(), qid, answer_body(words, with_code=False), 11)

# how-to whose only code answer carries a dead link
qid = take_id()
question(qid, "How to export the table header", "<p>How can I export the %s?</p>" %
         theme_sentence(words, 2), ["swt"], 6)
gold.append((qid, "how_to_do_it"))
answer(take_id(), qid, answer_body(words, with_code=True, link=DEAD_404), 13)

# how-to whose question body carries a dead link
qid = take_id()
question(qid, "How to freeze the first column",
         '<p>Following <a href="%s">this write-up</a>: how can I freeze the %s?</p>' % (
             DEAD_TIMEOUT, words[1]), ["swt"], 5)
gold.append((qid, "how_to_do_it"))
add_answers(qid, words, 2)

# entity-rich how-to: literal &lt;br&gt; text, &amp;, accented char
qid = take_id()
question(qid, "How to show the Sélection &amp; more",
         "<p>The docs mention the literal tag &amp;lt;br&amp;gt; and the pair "
         "R&#233;sum&#233; &amp; notes.<br>How can I show the %s?</p>" % theme_sentence(words, 2),
         ["swt"], 4)
gold.append((qid, "how_to_do_it"))
add_answers(qid, words, 2)

# ---- other tags (filtered out by the swt run) ----
OTHER = [("linq", ["query", "select", "lambda", "group", "join", "filter"]),
         ("qt", ["slot", "signal", "qwidget", "qstring", "thread", "timer"])]
for tag, tag_words in OTHER:
    for i in range(11):
        qid = take_id()
        question(qid, "How to %s a %s with %s" % (VERBS[i % len(VERBS)],
                                                  tag_words[i % len(tag_words)], tag),
                 "<p>How can I %s the %s?</p>" % (VERBS[(i + 1) % len(VERBS)],
                                                  theme_sentence(tag_words, 3)),
                 [tag], rng.randrange(0, 12))
        add_answers(qid, tag_words, 2)

# ---- noise rows ----
row(Id=take_id(), PostTypeId=4, CreationDate=date_for(3), Body="<p>tag wiki excerpt</p>")
row(Id=take_id(), PostTypeId=5, CreationDate=date_for(4), Body="<p>tag wiki</p>")
row(Id=take_id(), PostTypeId=6, CreationDate=date_for(5), Body="<p>moderator nomination</p>")
# orphan answers (parent id never present)
answer(take_id(), 99999, answer_body(words), 3)
answer(take_id(), 99998, answer_body(words, with_code=False), 1)
# a row with a missing required attribute (no Body): skipped with a warning
rows.append('  <row Id="%d" PostTypeId="1" CreationDate="%s" Score="1" Title="broken row" />'
            % (take_id(), date_for(6)))

xml = '<?xml version="1.0" encoding="utf-8"?>\n<posts>\n' + "\n".join(rows) + "\n</posts>\n"
(HERE / "mini_dump.xml").write_text(xml, encoding="utf-8")

manifest = {link: 200 for link in ALIVE_LINKS}
manifest[DEAD_404] = 404
manifest[DEAD_TIMEOUT] = 0
(HERE / "mini_links.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

with open(HERE / "mini_gold.csv", "w") as fh:
    fh.write("thread_id,gold_label\n")
    for qid, label in gold:
        fh.write("%d,%s\n" % (qid, label))

config = {
    "dump": "tests/data/mini_dump.xml",
    "tag": "swt",
    "out": "out/swt",
    "build": {
        "r_min": 28,
        "ta": 0.35,
        "initial_max_rank": 15,
        "rank_step": 10,
        "min_chapter_size": 2,
        "question_char_limit": 1300,
    },
    "model": {"k": 6, "alpha": 0.5, "beta": 0.01, "iterations": 400, "seed": 7},
    "links": {"mode": "offline", "manifest": "tests/data/mini_links.json"},
}
(HERE / "mini_config.json").write_text(json.dumps(config, indent=2) + "\n")

print("rows:", len(rows), "swt questions:", len(gold))
