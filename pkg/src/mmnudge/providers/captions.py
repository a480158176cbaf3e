"""Image captioning: the only way images enter the embedding space.

The fixture backend serves the shipped captions. The remote backend speaks a
Hugging Face style visual question answering protocol::

    POST {endpoint}
    {"inputs": {"image": "<base64 bytes>", "question": "<prompt>"}}

    200 OK
    [{"generated_text": "..."}]      (or {"answer": ...})

Image bytes are forwarded untouched; nothing here decodes pixels.
"""

from __future__ import annotations

import base64
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import httpx

from mmnudge.errors import NotFoundError, ProviderError, ValidationError
from mmnudge.providers.remote import with_retries

PROMPTS = ("user_generation", "message_generation", "image_captioning")


@dataclass(frozen=True)
class Caption:
    image_id: str
    text: str

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise ValidationError(f"empty caption for {self.image_id!r}")


def load_prompt(name: str) -> str:
    """Text of a shipped prompt template (see ``PROMPTS``)."""
    if name not in PROMPTS:
        raise NotFoundError(f"unknown prompt {name!r}; available: {', '.join(PROMPTS)}")
    return resources.files("mmnudge.data").joinpath("prompts", f"{name}.txt").read_text(encoding="utf-8")


class FixtureCaptioner:
    """Returns stored captions verbatim."""

    def __init__(self, captions: dict[str, str]):
        self.captions = dict(captions)

    @classmethod
    def from_images(cls, images):
        return cls({img.id: img.caption for img in images})

    def caption(self, image_ref, prompt_template=None) -> Caption:
        image_id = str(image_ref)
        try:
            return Caption(image_id, self.captions[image_id])
        except KeyError:
            raise NotFoundError(f"no caption for image {image_id!r}") from None


class RemoteCaptioner:
    def __init__(self, endpoint, api_key=None, timeout=60.0, max_attempts=3, backoff=1.0,
                 client=None, sleep=time.sleep):
        self.endpoint = endpoint
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.timeout = timeout
        self._client = client or httpx.Client(timeout=timeout)
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._sleep = sleep

    def caption(self, image_ref, prompt_template) -> Caption:
        path = Path(image_ref)
        if not path.is_file():
            raise NotFoundError(f"image file not found: {path}")
        payload = {
            "inputs": {
                "image": base64.b64encode(path.read_bytes()).decode("ascii"),
                "question": prompt_template,
            }
        }
        response = with_retries(
            lambda: self._client.post(self.endpoint, json=payload, headers=self._headers, timeout=self.timeout),
            self.max_attempts, self.backoff, self._sleep, what="caption request",
        )
        try:
            body = response.json()
            if isinstance(body, list):
                body = body[0]
            text = body.get("generated_text") or body.get("answer")
        except (ValueError, AttributeError, IndexError) as exc:
            raise ProviderError(f"malformed caption response: {exc}", status=response.status_code) from exc
        if not text:
            raise ProviderError("caption response carried no text", status=response.status_code)
        return Caption(path.stem, text.strip())


def caption_image(image_ref, prompt_template, provider) -> Caption:
    return provider.caption(image_ref, prompt_template)
