"""Few-shot prompt templates asking a model to describe a noun with adjectives.

Every supported language gets the same three-line structure: two worked
(noun -> adjective list) demonstrations, then the question for the target noun.
The noun slot is the literal ``<>`` marker and is filled with the quoted
surface form at render time. Unknown (synthetic) language tags fall back to
the English wording so generated validation languages flow through the same
pipeline.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import ValidationError
from .lexicon import Noun

NOUN_SLOT = "<>"


@dataclass(frozen=True)
class PromptTemplate:
    language: str
    text: str
    exemplars: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        if self.text.count(NOUN_SLOT) != 1:
            raise ValidationError(
                f"template for {self.language!r} must contain exactly one {NOUN_SLOT!r} slot"
            )


def _build_template(
    language: str,
    question_label: str,
    answer_label: str,
    describe_format: str,
    exemplars: tuple[tuple[str, tuple[str, ...]], ...],
) -> PromptTemplate:
    lines = []
    for noun_word, adjectives in exemplars:
        question = describe_format.format(noun=f'"{noun_word}"')
        lines.append(
            f"***{question_label}***: {question} ***{answer_label}***: {', '.join(adjectives)}"
        )
    final_question = describe_format.format(noun=NOUN_SLOT)
    lines.append(f"***{question_label}***: {final_question} ***{answer_label}***:")
    return PromptTemplate(language=language, text="\n".join(lines), exemplars=exemplars)


_EN_DESCRIBE = "Describe the word {noun} using comma-separated adjectives."

# (question label, answer label, question format, bottle exemplar, stone exemplar)
_TEMPLATE_DATA: dict[str, tuple[str, str, str, tuple[str, tuple[str, ...]], tuple[str, tuple[str, ...]]]] = {
    "en": (
        "Question",
        "Answer",
        _EN_DESCRIBE,
        ("bottle", ("glass", "sleek", "thin", "brittle", "elegant", "transparent", "clear", "tall", "fragile", "shiny")),
        ("stone", ("round", "old", "strong", "cold", "solid", "ancient", "sturdy", "dense", "natural", "durable")),
    ),
    "es": (
        "Pregunta",
        "Respuesta",
        "Describe la palabra {noun} usando adjetivos separados por comas.",
        ("botella", ("vidrio", "liso", "delgado", "quebradizo", "elegante", "transparente", "claro", "alto", "frágil", "brillante")),
        ("piedra", ("redondo", "viejo", "fuerte", "frío", "sólido", "antiguo", "robusto", "denso", "natural", "duradero")),
    ),
    "fr": (
        "Question",
        "Réponse",
        "Décris le mot {noun} en utilisant des adjectifs séparés par des virgules.",
        ("bouteille", ("verre", "lisse", "mince", "cassant", "élégant", "transparent", "clair", "grand", "fragile", "brillant")),
        ("pierre", ("rond", "vieux", "fort", "froid", "solide", "ancien", "robuste", "dense", "naturel", "durable")),
    ),
    "de": (
        "Frage",
        "Antwort",
        "Beschreibe das Wort {noun} mit durch Kommas getrennten Adjektiven.",
        ("Flasche", ("gläsern", "glatt", "dünn", "spröde", "elegant", "durchsichtig", "klar", "hoch", "zerbrechlich", "glänzend")),
        ("Stein", ("rund", "alt", "stark", "kalt", "massiv", "uralt", "robust", "dicht", "natürlich", "langlebig")),
    ),
    "it": (
        "Domanda",
        "Risposta",
        "Descrivi la parola {noun} usando aggettivi separati da virgole.",
        ("bottiglia", ("vetro", "liscio", "sottile", "fragile", "elegante", "trasparente", "chiaro", "alto", "delicato", "lucido")),
        ("pietra", ("rotondo", "vecchio", "forte", "freddo", "solido", "antico", "robusto", "denso", "naturale", "resistente")),
    ),
    "pt": (
        "Pergunta",
        "Resposta",
        "Descreva a palavra {noun} usando adjetivos separados por vírgulas.",
        ("garrafa", ("vidro", "liso", "fino", "quebradiço", "elegante", "transparente", "claro", "alto", "frágil", "brilhante")),
        ("pedra", ("redondo", "velho", "forte", "frio", "sólido", "antigo", "robusto", "denso", "natural", "durável")),
    ),
    "bg": (
        "Въпрос",
        "Отговор",
        "Опиши думата {noun} с прилагателни, разделени със запетаи.",
        ("бутилка", ("стъклен", "гладък", "тънък", "чуплив", "елегантен", "прозрачен", "ясен", "висок", "крехък", "лъскав")),
        ("камък", ("кръгъл", "стар", "силен", "студен", "твърд", "древен", "здрав", "плътен", "естествен", "издръжлив")),
    ),
    "cs": (
        "Otázka",
        "Odpověď",
        "Popiš slovo {noun} pomocí přídavných jmen oddělených čárkami.",
        ("láhev", ("skleněný", "hladký", "tenký", "křehký", "elegantní", "průhledný", "čirý", "vysoký", "rozbitný", "lesklý")),
        ("kámen", ("kulatý", "starý", "silný", "studený", "pevný", "starobylý", "odolný", "hustý", "přírodní", "trvanlivý")),
    ),
    "el": (
        "Ερώτηση",
        "Απάντηση",
        "Περίγραψε τη λέξη {noun} χρησιμοποιώντας επίθετα χωρισμένα με κόμματα.",
        ("μπουκάλι", ("γυάλινος", "λείος", "λεπτός", "εύθραυστος", "κομψός", "διαφανής", "καθαρός", "ψηλός", "ντελικάτος", "γυαλιστερός")),
        ("πέτρα", ("στρογγυλός", "παλιός", "δυνατός", "κρύος", "στερεός", "αρχαίος", "γερός", "πυκνός", "φυσικός", "ανθεκτικός")),
    ),
    "hi": (
        "प्रश्न",
        "उत्तर",
        "{noun} शब्द का वर्णन अल्पविराम से अलग किए गए विशेषणों का उपयोग करके करें।",
        ("बोतल", ("काँच का", "चिकना", "पतला", "भंगुर", "सुंदर", "पारदर्शी", "साफ़", "लंबा", "नाज़ुक", "चमकदार")),
        ("पत्थर", ("गोल", "पुराना", "मज़बूत", "ठंडा", "ठोस", "प्राचीन", "खुरदरा", "घना", "प्राकृतिक", "टिकाऊ")),
    ),
    "lv": (
        "Jautājums",
        "Atbilde",
        "Apraksti vārdu {noun}, izmantojot ar komatiem atdalītus īpašības vārdus.",
        ("pudele", ("stikla", "gluds", "tievs", "trausls", "elegants", "caurspīdīgs", "dzidrs", "augsts", "plīstošs", "spīdīgs")),
        ("akmens", ("apaļš", "vecs", "stiprs", "auksts", "ciets", "sens", "izturīgs", "blīvs", "dabisks", "noturīgs")),
    ),
}

TEMPLATES: dict[str, PromptTemplate] = {
    lang: _build_template(lang, q, a, fmt, (ex1, ex2))
    for lang, (q, a, fmt, ex1, ex2) in _TEMPLATE_DATA.items()
}


def template_for(language: str) -> PromptTemplate:
    """Return the registered template, or an English-worded one for synthetic tags."""
    if language in TEMPLATES:
        return TEMPLATES[language]
    q, a, fmt, ex1, ex2 = _TEMPLATE_DATA["en"]
    return _build_template(language, q, a, fmt, (ex1, ex2))


def render_prompt(template: PromptTemplate, noun: Noun) -> str:
    """Substitute the quoted noun surface into the template's question slot."""
    if template.language != noun.language:
        raise ValidationError(
            f"template language {template.language!r} does not match noun language "
            f"{noun.language!r}"
        )
    return template.text.replace(NOUN_SLOT, f'"{noun.surface}"')


def prompt_sha256(prompt: str) -> str:
    """Content address of a rendered prompt (hex sha256 of its UTF-8 bytes)."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()
