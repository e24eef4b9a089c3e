"""Fixed colors for the HTML renderer.

Orange marks words pushing toward the explained class, blue marks words
pushing away. Golden-file tests pin these values; change them and the
goldens together.
"""

POSITIVE_HEX = "#e67e22"
NEGATIVE_HEX = "#3498db"
NEUTRAL_HEX = "#9aa0a6"

POSITIVE_RGB = (230, 126, 34)
NEGATIVE_RGB = (52, 152, 219)
