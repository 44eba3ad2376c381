"""HTML-to-text extraction."""

from glsb.textutil import strip_html


def test_plain_text_passes_through():
    assert strip_html("no markup here") == "no markup here"


def test_tags_removed():
    assert strip_html("<p>Tech Debt!</p>").strip() == "Tech Debt!"


def test_block_boundaries_keep_words_apart():
    text = strip_html("<p>first</p><p>second</p>")
    assert "first" in text and "second" in text
    assert "firstsecond" not in text


def test_inline_markup_does_not_split_words():
    assert "shortcut" in strip_html("<p>s<b>hortcu</b>t? no: short<i>cut</i></p>")


def test_entities_decoded():
    assert strip_html("a &amp; b &lt;ok&gt;") == "a & b <ok>"


def test_script_and_style_contents_dropped():
    text = strip_html("<p>keep</p><script>var debt = 1;</script><style>.x{}</style>")
    assert "keep" in text
    assert "debt" not in text


def test_attribute_values_never_leak():
    assert "debt" not in strip_html('<a href="debt.html" title="debt">link</a>x')


def test_malformed_html_is_tolerated():
    assert "text" in strip_html("<p><b>text</p>")
