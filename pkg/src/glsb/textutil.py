"""Plain-text extraction from discussion HTML bodies.

Bodies are stored verbatim at ingestion; everything downstream (search,
similarity scoring, UI snippets) strips markup through this module so there
is exactly one definition of "the text of a post".
"""

from __future__ import annotations

from html.parser import HTMLParser

# Tags that terminate a word: text on either side must not be glued together.
_BLOCK_TAGS = {
    "p", "div", "br", "li", "ul", "ol", "pre", "blockquote", "table", "tr",
    "td", "th", "h1", "h2", "h3", "h4", "h5", "h6", "hr", "img",
}

_DROP_CONTENT_TAGS = {"script", "style"}


class _TextExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._drop_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _DROP_CONTENT_TAGS:
            self._drop_depth += 1
        elif tag in _BLOCK_TAGS:
            self.parts.append(" ")

    def handle_endtag(self, tag):
        if tag in _DROP_CONTENT_TAGS and self._drop_depth > 0:
            self._drop_depth -= 1
        elif tag in _BLOCK_TAGS:
            self.parts.append(" ")

    def handle_data(self, data):
        if not self._drop_depth:
            self.parts.append(data)


def strip_html(text: str) -> str:
    """Return the visible text of an HTML fragment.

    Block-level boundaries become single spaces so words never merge across
    paragraphs; inline markup is removed without inserting separators.
    Entity references are decoded by the parser. Lenient on malformed input.
    """
    if "<" not in text and "&" not in text:
        return text
    extractor = _TextExtractor()
    extractor.feed(text)
    extractor.close()
    return "".join(extractor.parts)
