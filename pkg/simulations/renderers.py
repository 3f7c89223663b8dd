import json

import numpy as np
from rest_framework.renderers import JSONRenderer


class SummaryJSONRenderer(JSONRenderer):
    """JSON with numeric lists kept on one line and shortest round-trip floats"""

    def render(self, data, accepted_media_type=None, renderer_context=None):
        if data is None:
            return b''
        return (self._format_json(data) + '\n').encode('utf-8')

    def _convert_to_serializable(self, obj):
        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, dict):
            return {k: self._convert_to_serializable(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self._convert_to_serializable(item) for item in obj]
        return obj

    def _format_json(self, obj, indent=0):
        obj = self._convert_to_serializable(obj)
        indent_str = "  " * indent

        if isinstance(obj, dict):
            if not obj:
                return "{}"
            items = [
                f'{indent_str}  {json.dumps(str(key))}: {self._format_json(value, indent + 1)}'
                for key, value in obj.items()
            ]
            return "{\n" + ",\n".join(items) + "\n" + indent_str + "}"

        if isinstance(obj, list):
            if not obj:
                return "[]"
            if all(isinstance(item, (int, float, str, bool, type(None))) for item in obj):
                return json.dumps(obj, ensure_ascii=False, allow_nan=False)
            items = [f"{indent_str}  {self._format_json(item, indent + 1)}" for item in obj]
            return "[\n" + ",\n".join(items) + f"\n{indent_str}]"

        return json.dumps(obj, ensure_ascii=False, allow_nan=False)
