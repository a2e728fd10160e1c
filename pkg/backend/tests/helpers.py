import json
from typing import Any, Dict, List


def last_json_line(text: str) -> Dict[str, Any]:
    """The last line of text that parses as a JSON object"""
    for line in reversed(text.strip().splitlines()):
        line = line.strip()
        if line.startswith("{"):
            return json.loads(line)
    raise AssertionError(f"no JSON object in output: {text!r}")


def json_lines(text: str) -> List[Dict[str, Any]]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]
