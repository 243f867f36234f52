"""
Funções de validação para parâmetros físicos e de configuração.
Cada validador tem um propósito claro e nomeia a chave de configuração ofendida.
"""
from typing import Sequence

import numpy as np

from marcha_app.core.excecoes import ExcecaoDadosInvalidos


def validar_dimensao(valor, tamanho_esperado: int, nome: str) -> np.ndarray:
    """
    Valida tamanho e finitude de um vetor.

    Args:
        valor: Sequência numérica
        tamanho_esperado: Número de entradas exigido
        nome: Nome usado na mensagem de erro

    Returns:
        Vetor numpy validado

    Raises:
        ExcecaoDadosInvalidos: Se o tamanho não confere ou há entradas não finitas
    """
    vetor = np.asarray(valor, dtype=float).reshape(-1)
    if vetor.size != tamanho_esperado:
        raise ExcecaoDadosInvalidos(
            f"{nome}: esperado vetor de dimensão {tamanho_esperado}, recebido {vetor.size}"
        )
    if not np.all(np.isfinite(vetor)):
        raise ExcecaoDadosInvalidos(f"{nome}: entradas devem ser finitas")
    return vetor


def validar_numero_elos(n: int) -> None:
    """
    Valida o número de elos.

    Raises:
        ExcecaoDadosInvalidos: Se n não for ímpar e maior ou igual a 3
    """
    if int(n) != n or n < 3 or n % 2 == 0:
        raise ExcecaoDadosInvalidos(f"[biped].n deve ser inteiro ímpar >= 3, recebido {n}")


def validar_parametros_bipede(
    n: int,
    comprimentos: Sequence[float],
    distancias_com: Sequence[float],
    massas: Sequence[float],
    inercias: Sequence[float],
    gravidade: float
) -> None:
    """
    Valida os parâmetros físicos da cadeia e a simetria das pernas.

    A perna de balanço é medida a partir do quadril, então a simetria exige
    d[n-j+1] = ell[j] - d[j].

    Raises:
        ExcecaoDadosInvalidos: Se algum parâmetro for inválido
    """
    validar_numero_elos(n)
    ell = validar_dimensao(comprimentos, n, "[biped].ell")
    d = validar_dimensao(distancias_com, n, "[biped].d")
    m = validar_dimensao(massas, n, "[biped].m")
    j = validar_dimensao(inercias, n, "[biped].j")

    if np.any(ell <= 0):
        raise ExcecaoDadosInvalidos("[biped].ell: comprimentos devem ser positivos")
    if np.any(m <= 0):
        raise ExcecaoDadosInvalidos("[biped].m: massas devem ser positivas")
    if np.any(j < 0):
        raise ExcecaoDadosInvalidos("[biped].j: inércias não podem ser negativas")
    if np.any(d < 0) or np.any(d > ell):
        raise ExcecaoDadosInvalidos("[biped].d: centro de massa deve ficar sobre o elo")
    if not np.isfinite(gravidade) or gravidade <= 0:
        raise ExcecaoDadosInvalidos("[biped].g: gravidade deve ser positiva")

    for indice in range((n - 1) // 2):
        espelho = n - 1 - indice
        simetrico = (
            np.isclose(ell[espelho], ell[indice])
            and np.isclose(m[espelho], m[indice])
            and np.isclose(j[espelho], j[indice])
            and np.isclose(d[espelho], ell[indice] - d[indice])
        )
        if not simetrico:
            raise ExcecaoDadosInvalidos(
                f"[biped]: pernas assimétricas entre os elos {indice + 1} e {espelho + 1}"
            )


def validar_parametros_vhc(n: int, a, k, g, h, theta1_i: float) -> None:
    """
    Valida os parâmetros das VHCs senoidais.

    Raises:
        ExcecaoDadosInvalidos: Se dimensões ou valores forem inválidos
    """
    validar_dimensao(a, n - 1, "[vhc].a")
    validar_dimensao(g, n - 1, "[vhc].g")
    validar_dimensao(h, n - 1, "[vhc].h")
    inteiros = validar_dimensao(k, n - 1, "[vhc].k")
    if np.any(inteiros != np.round(inteiros)):
        raise ExcecaoDadosInvalidos("[vhc].k: deslocamentos devem ser inteiros")
    if not np.isfinite(theta1_i):
        raise ExcecaoDadosInvalidos("[vhc].theta1_i deve ser finito")


def validar_ganhos(kp: np.ndarray, kd: np.ndarray) -> None:
    """
    Valida ganhos diagonais positivos.

    Raises:
        ExcecaoDadosInvalidos: Se alguma entrada diagonal não for positiva
    """
    for nome, matriz in (("[controller].kp", kp), ("[controller].kd", kd)):
        if not np.allclose(matriz, np.diag(np.diag(matriz))) or np.any(np.diag(matriz) <= 0):
            raise ExcecaoDadosInvalidos(f"{nome}: ganho deve ser diagonal positivo")


def validar_config_alto_ganho(mu: float, tolerancia_parada: float, lambda_: np.ndarray) -> None:
    """
    Valida a realização por alto ganho.

    Raises:
        ExcecaoDadosInvalidos: Se mu, tolerância ou Lambda forem inválidos
    """
    if mu <= 0:
        raise ExcecaoDadosInvalidos("[controller].mu deve ser positivo")
    if tolerancia_parada <= 0:
        raise ExcecaoDadosInvalidos("[controller].stop_tol deve ser positivo")
    simetrica = 0.5 * (lambda_ + lambda_.T)
    if np.any(np.linalg.eigvalsh(simetrica) <= 0):
        raise ExcecaoDadosInvalidos("[controller].lambda deve ser positiva definida")


def validar_intervalo(inferior: float, superior: float, nome: str) -> None:
    """
    Valida um intervalo não vazio.

    Raises:
        ExcecaoDadosInvalidos: Se inferior >= superior
    """
    if not (np.isfinite(inferior) and np.isfinite(superior)) or inferior >= superior:
        raise ExcecaoDadosInvalidos(f"{nome}: intervalo vazio [{inferior}, {superior}]")


def validar_positivo(valor: float, nome: str) -> None:
    """
    Valida um escalar estritamente positivo.

    Raises:
        ExcecaoDadosInvalidos: Se o valor não for positivo e finito
    """
    if not np.isfinite(valor) or valor <= 0:
        raise ExcecaoDadosInvalidos(f"{nome} deve ser positivo, recebido {valor}")
