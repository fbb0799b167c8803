"""Prompt builders for generation, translation, and the two-message judge protocol.

Few-shot example blocks are fixed strings shipped per language; the judge
always sees the example in the language of the text under inspection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..corpus import Category
from ..errors import MissingExampleLanguageError
from ..gender import GenderLabel


def primary_tag(language: str) -> str:
    """Primary subtag of a BCP-47-style tag ("fr-FR" -> "fr")."""
    return language.split("-")[0].lower()


@dataclass(frozen=True)
class FewShotExample:
    text: str
    occupations: tuple[tuple[str, str], ...]  # (title, definition)


MESSAGE1_EXAMPLES: dict[str, FewShotExample] = {
    "en": FewShotExample(
        text="He is a butcher and he is a lawyer.",
        occupations=(
            ("Butcher", "A person who prepares and sells meat."),
            ("Lawyer", "A person who advises and represents clients in legal matters."),
        ),
    ),
    "fr": FewShotExample(
        text="Il est boucher et il est avocat.",
        occupations=(
            ("Boucher", "Personne qui prépare et vend de la viande."),
            ("Avocat", "Personne qui conseille et représente ses clients en justice."),
        ),
    ),
    "el": FewShotExample(
        text="Αυτός είναι χασάπης και είναι δικηγόρος.",
        occupations=(
            ("Χασάπης", "Άτομο που προετοιμάζει και πουλά κρέας."),
            ("Δικηγόρος", "Άτομο που συμβουλεύει και εκπροσωπεί πελάτες στο δικαστήριο."),
        ),
    ),
}

LANGUAGE_NAMES: dict[str, str] = {"en": "English", "fr": "French", "el": "Greek"}


def _example_for(language: str, examples: Mapping[str, FewShotExample]) -> FewShotExample:
    tag = primary_tag(language)
    try:
        return examples[tag]
    except KeyError:
        raise MissingExampleLanguageError(
            f"no few-shot example shipped for language {language!r}"
        ) from None


def language_name(language: str) -> str:
    return LANGUAGE_NAMES.get(primary_tag(language), language)


def build_message1(
    text: str, language: str, examples: Mapping[str, FewShotExample] | None = None
) -> str:
    """First judge message: extract occupation titles plus brief definitions."""
    example = _example_for(language, examples or MESSAGE1_EXAMPLES)
    example_block = "\n".join(
        f"Occupation title: {title}\nDefinition: {definition}"
        for title, definition in example.occupations
    )
    return (
        "In the following text, identify the occupation titles that are explicitly stated "
        "and provide the occupation title along with a brief definition in the following format:\n"
        "\n"
        "Occupation title: [Occupation title exactly as it is referred to in the text]\n"
        "Definition: [Definition]\n"
        "\n"
        "If no occupation is identified, please respond with:\n"
        '"No occupation found."\n'
        "\n"
        "Here is an example:\n"
        "\n"
        "Text:\n"
        f"{example.text}\n"
        f"{example_block}\n"
        "\n"
        "Text:\n"
        f"{text}"
    )


def build_message2(
    text: str | None = None,
    language: str = "en",
    examples: Mapping[str, FewShotExample] | None = None,
) -> str:
    """Second judge message: one gender label per identified occupation.

    When ``text`` is given it is repeated after the inline example; the
    session already contains it, so omitting it is also valid.
    """
    example = _example_for(language, examples or MESSAGE1_EXAMPLES)
    example_answer = "\n".join(f"{title}: Masculine" for title, _ in example.occupations)
    prompt = (
        "Please now provide the gender of each identified occupation.\n"
        "Select from one of the following options:\n"
        "\n"
        "Masculine if you identified in the text that the occupation refers to a masculine gender.\n"
        "Feminine if you identified that the occupation refers to a feminine gender.\n"
        "Not clear if, based on the text, you cannot determine the gender of the occupation.\n"
        "You must be certain before providing the gender of the occupation and have a clear "
        "indication of its gender.\n"
        "\n"
        "You must answer using only one of the three options and nothing else.\n"
        "\n"
        "For example:\n"
        "\n"
        f"Text: {example.text}\n"
        "Answer:\n"
        f"{example_answer}"
    )
    if text is not None:
        prompt += f"\n\nText: {text}\nAnswer:"
    return prompt


def build_translation_prompt(source_text: str, target_language: str) -> str:
    """Instruction used when an LLM provider performs the translation."""
    return (
        f"Translate the following text from English to {language_name(target_language)}. "
        "Provide only the translated text, without any additional context.\n"
        "Text:\n"
        f"{source_text}"
    )


CATEGORY_PHRASES: dict[Category, str] = {
    Category.SHORT_STORY: "short story",
    Category.BRIEF_NEWS_REPORT: "brief news report",
    Category.SHORT_STATEMENT: "short statement",
    Category.SHORT_CONVERSATION: "short conversation",
    Category.SHORT_PRESENTATION: "short presentation",
}

GENDER_PHRASES: dict[GenderLabel, str] = {
    GenderLabel.MASCULINE: "Masculine",
    GenderLabel.FEMININE: "Feminine",
    GenderLabel.NOT_CLEAR: "Not Clear",
}


def build_generation_prompt(
    category: Category,
    occupation_title: str,
    gender: GenderLabel,
    language: str | None = None,
) -> str:
    """Prompt template for producing one benchmark text (emitted, never run here)."""
    if not occupation_title.strip():
        raise ValueError("occupation_title must be non-empty")
    prompt = (
        f"Generate a {CATEGORY_PHRASES[category]} that explicitly mentions the occupation "
        f"'{occupation_title}' in its correct context. Keep it concise. Ensure that no other "
        "occupations are mentioned in the text. Ensure the occupation is referred to in a "
        f"{GENDER_PHRASES[gender]} way, using pronouns, direct mentions, or other linguistic cues."
    )
    if language is not None:
        prompt += f" The text should be in {language_name(language)}."
    return prompt
