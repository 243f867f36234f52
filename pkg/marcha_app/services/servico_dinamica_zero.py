"""
Serviço da dinâmica zero - Dinâmica reduzida de q2 sobre a VHC.

Sobre a variedade de restrição a coordenada passiva obedece
ddq2 = alpha1(q2) + alpha2(q2) dq2^2, que admite a integral de movimento
E = 1/2 Psi(q2) dq2^2 + P(q2) com Psi = exp(-2 int alpha2) e P = -int Psi alpha1.
"""
import logging
from typing import List, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from marcha_app.core.constantes import (
    CONDICAO_MAXIMA,
    PONTOS_GRADE_POTENCIAL,
    TOLERANCIA_QUADRATURA,
)
from marcha_app.core.excecoes import (
    ExcecaoDadosInvalidos,
    ExcecaoNumerica,
    ExcecaoOrbitaInviavel,
    ExcecaoVhcIrregular,
)
from marcha_app.core.utilitarios import diferenca_angular, registrar_evento
from marcha_app.core.validadores import validar_intervalo
from marcha_app.dominio import (
    DefinicaoMarcha,
    DinamicaZero,
    Estado,
    Orbita,
    ParametrosBipede,
    VerificacaoInvariante,
)
from marcha_app.services.servico_modelo import ServicoModelo
from marcha_app.services.servico_vhc import ServicoVhc

logger = logging.getLogger(__name__)

LIMITE_CONSERVACAO = 1e-6
# folga numérica ao testar se q2 está no intervalo
FOLGA_INTERVALO = 1e-9


class ServicoDinamicaZero:
    """Serviço para a dinâmica zero, a integral de movimento e a órbita alvo."""

    @staticmethod
    def coeficientes_alfa(marcha: DefinicaoMarcha, bipede: ParametrosBipede, q2: float) -> Tuple[float, float]:
        """
        Coeficientes alpha1 e alpha2 da dinâmica zero em q2.

        Obtidos da linha passiva M21 ddq1 + M22 ddq2 + h2 = 0 com q1 = Phi(q2).

        Raises:
            ExcecaoVhcIrregular: Se M12^T Phi' + M22 se anula em q2
        """
        phi_linha = ServicoVhc.phi_linha(marcha, q2)
        q = np.append(ServicoVhc.phi(marcha, q2), q2)
        _, m12, m22 = ServicoModelo.particionar_matriz_massa(ServicoModelo.matriz_massa(bipede, q))
        denominador = float(m12 @ phi_linha + m22)
        if abs(denominador) * CONDICAO_MAXIMA <= abs(m22):
            raise ExcecaoVhcIrregular(f"Dinâmica zero indefinida em q2 = {q2:.6f}")

        gravidade = ServicoModelo.forcas_bias(bipede, q, np.zeros(bipede.n))[-1]
        direcao = np.append(phi_linha, 1.0)
        com_velocidade = ServicoModelo.forcas_bias(bipede, q, direcao)[-1]

        alfa1 = -gravidade / denominador
        alfa2 = -(m12 @ ServicoVhc.phi_duas_linhas(marcha, q2) + com_velocidade - gravidade) / denominador
        return float(alfa1), float(alfa2)

    @staticmethod
    def construir_dinamica_zero(
        marcha: DefinicaoMarcha,
        bipede: ParametrosBipede,
        intervalo: Tuple[float, float]
    ) -> DinamicaZero:
        """
        Integra Psi e P a partir de q2 = 0 para cada extremo do intervalo.

        Args:
            marcha: Definição da marcha
            bipede: Parâmetros físicos
            intervalo: Intervalo de operação (deve conter 0)

        Returns:
            DinamicaZero com as soluções densas

        Raises:
            ExcecaoDadosInvalidos: Intervalo vazio ou sem a origem
            ExcecaoNumerica: Falha na quadratura
        """
        inferior, superior = intervalo
        validar_intervalo(inferior, superior, "[orbit] intervalo de operação")
        if not inferior < 0.0 < superior:
            raise ExcecaoDadosInvalidos("[orbit] intervalo de operação deve conter q2 = 0")

        def integrando(q2: float, y: np.ndarray) -> np.ndarray:
            alfa1, alfa2 = ServicoDinamicaZero.coeficientes_alfa(marcha, bipede, q2)
            return np.array([alfa2, -np.exp(-2.0 * y[0]) * alfa1])

        solucoes = []
        for limite in (superior, inferior):
            solucao = solve_ivp(
                integrando,
                (0.0, limite),
                np.zeros(2),
                method='DOP853',
                rtol=TOLERANCIA_QUADRATURA,
                atol=TOLERANCIA_QUADRATURA,
                dense_output=True,
            )
            if not solucao.success:
                registrar_evento("error", "Falha na quadratura da dinâmica zero", logger, mensagem=solucao.message)
                raise ExcecaoNumerica(f"Falha na quadratura da dinâmica zero: {solucao.message}")
            solucoes.append(solucao)

        return DinamicaZero(
            marcha=marcha,
            parametros=bipede,
            intervalo=(float(inferior), float(superior)),
            solucao_positiva=solucoes[0],
            solucao_negativa=solucoes[1],
        )

    @staticmethod
    def _validar_ponto(dinamica_zero: DinamicaZero, q2: float) -> None:
        inferior, superior = dinamica_zero.intervalo
        if not inferior - FOLGA_INTERVALO <= q2 <= superior + FOLGA_INTERVALO:
            raise ExcecaoDadosInvalidos(f"q2 = {q2:.6f} fora do intervalo [{inferior:.6f}, {superior:.6f}]")

    @staticmethod
    def energia_e_potencial(dinamica_zero: DinamicaZero, q2: float, dq2: float) -> Tuple[float, float]:
        """
        Integral de movimento e potencial virtual.

        Returns:
            (E, P(q2))
        """
        ServicoDinamicaZero._validar_ponto(dinamica_zero, q2)
        psi, potencial = dinamica_zero.integrais(q2)
        return 0.5 * psi * dq2 ** 2 + potencial, potencial

    @staticmethod
    def derivada_potencial(dinamica_zero: DinamicaZero, q2: float) -> float:
        """P'(q2) = -Psi(q2) alpha1(q2)."""
        psi, _ = dinamica_zero.integrais(q2)
        alfa1, _ = ServicoDinamicaZero.coeficientes_alfa(dinamica_zero.marcha, dinamica_zero.parametros, q2)
        return -psi * alfa1

    @staticmethod
    def extremos_potencial(dinamica_zero: DinamicaZero, pontos: int = PONTOS_GRADE_POTENCIAL) -> Tuple[float, float]:
        """
        Mínimo e máximo de P no intervalo de operação.

        Extremos interiores são refinados por brentq sobre P'.
        """
        grade = np.linspace(*dinamica_zero.intervalo, pontos)
        potenciais = [dinamica_zero.integrais(q2)[1] for q2 in grade]
        derivadas = np.array([ServicoDinamicaZero.derivada_potencial(dinamica_zero, q2) for q2 in grade])

        candidatos = list(potenciais)
        for indice in np.nonzero(np.sign(derivadas[:-1]) * np.sign(derivadas[1:]) < 0)[0]:
            raiz = brentq(
                lambda q2: ServicoDinamicaZero.derivada_potencial(dinamica_zero, q2),
                grade[indice],
                grade[indice + 1],
                xtol=1e-14,
            )
            candidatos.append(dinamica_zero.integrais(raiz)[1])
        return float(np.min(candidatos)), float(np.max(candidatos))

    @staticmethod
    def construir_orbita(dinamica_zero: DinamicaZero, ancora: Tuple[float, float]) -> Orbita:
        """
        Define a órbita alvo pelo nível c* da âncora.

        Raises:
            ExcecaoOrbitaInviavel: Se c* <= P_max (dq2 trocaria de sinal)
        """
        q2_ancora, dq2_ancora = ancora
        c_estrela, _ = ServicoDinamicaZero.energia_e_potencial(dinamica_zero, q2_ancora, dq2_ancora)
        potencial_min, potencial_max = ServicoDinamicaZero.extremos_potencial(dinamica_zero)

        registrar_evento(
            "info",
            "Órbita alvo construída",
            logger,
            c_estrela=c_estrela,
            potencial_min=potencial_min,
            potencial_max=potencial_max
        )
        if c_estrela <= potencial_max:
            raise ExcecaoOrbitaInviavel(
                f"Órbita inviável: c* = {c_estrela:.6g} não excede P_max = {potencial_max:.6g}"
            )
        return Orbita(
            dinamica_zero=dinamica_zero,
            ancora=(float(q2_ancora), float(dq2_ancora)),
            c_estrela=float(c_estrela),
            potencial_min=potencial_min,
            potencial_max=potencial_max,
        )

    @staticmethod
    def velocidade_orbita(orbita: Orbita, q2: float) -> float:
        """
        dq2 < 0 sobre a órbita em q2.

        Raises:
            ExcecaoOrbitaInviavel: Se a órbita não alcança q2
        """
        ServicoDinamicaZero._validar_ponto(orbita.dinamica_zero, q2)
        psi, potencial = orbita.dinamica_zero.integrais(q2)
        folga = orbita.c_estrela - potencial
        if folga <= 0:
            raise ExcecaoOrbitaInviavel(f"A órbita não alcança q2 = {q2:.6f}")
        return -float(np.sqrt(2.0 * folga / psi))

    @staticmethod
    def levantar_para_variedade(marcha: DefinicaoMarcha, q2: float, dq2: float) -> Estado:
        """Estado sobre a variedade: q1 = Phi(q2), dq1 = Phi'(q2) dq2."""
        return Estado(
            q1=ServicoVhc.phi(marcha, q2),
            q2=q2,
            dq1=ServicoVhc.phi_linha(marcha, q2) * dq2,
            dq2=dq2,
        )

    @staticmethod
    def amostrar(dinamica_zero: DinamicaZero, pontos: int = PONTOS_GRADE_POTENCIAL) -> np.ndarray:
        """Tabela (q2, alpha1, alpha2, Psi, P) numa grade uniforme do intervalo."""
        linhas = []
        for q2 in np.linspace(*dinamica_zero.intervalo, pontos):
            alfa1, alfa2 = ServicoDinamicaZero.coeficientes_alfa(dinamica_zero.marcha, dinamica_zero.parametros, q2)
            psi, potencial = dinamica_zero.integrais(q2)
            linhas.append((q2, alfa1, alfa2, psi, potencial))
        return np.array(linhas)

    @staticmethod
    def amostrar_orbita(orbita: Orbita, pontos: int = PONTOS_GRADE_POTENCIAL) -> np.ndarray:
        """Curva (q2, dq2) da órbita alvo no intervalo de operação."""
        grade = np.linspace(*orbita.dinamica_zero.intervalo, pontos)
        return np.array([(q2, ServicoDinamicaZero.velocidade_orbita(orbita, q2)) for q2 in grade])

    @staticmethod
    def verificar_conservacao_energia(orbita: Orbita) -> List[VerificacaoInvariante]:
        """
        Condições suficientes de marcha conservativa nos extremos +-theta1_i da órbita.

        Returns:
            Verificações de potencial igual, velocidades de junta iguais e pé parado no toque
        """
        marcha = orbita.marcha
        bipede = orbita.parametros
        theta1_i = marcha.theta1_i

        estados = []
        for q2 in (theta1_i, -theta1_i):
            estado = ServicoDinamicaZero.levantar_para_variedade(
                marcha, q2, ServicoDinamicaZero.velocidade_orbita(orbita, q2)
            )
            estados.append((estado, ServicoModelo.generalizado_para_absoluto(bipede, estado)))
        (_, inicial), (final_estado, final) = estados

        erro_potencial = float(np.max(np.abs(diferenca_angular(final.theta, -inicial.theta))))
        erro_velocidades = float(np.max(np.abs(final.dtheta - inicial.dtheta)))
        velocidade_pe = float(np.linalg.norm(
            ServicoModelo.velocidade_pe_balanco(bipede, final_estado.q, final_estado.dq)
        ))

        verificacoes = [
            VerificacaoInvariante(
                "potencial igual nos extremos", erro_potencial <= LIMITE_CONSERVACAO,
                erro_potencial, LIMITE_CONSERVACAO
            ),
            VerificacaoInvariante(
                "velocidades de junta iguais", erro_velocidades <= LIMITE_CONSERVACAO,
                erro_velocidades, LIMITE_CONSERVACAO
            ),
            VerificacaoInvariante(
                "pé de balanço parado no toque", velocidade_pe <= LIMITE_CONSERVACAO,
                velocidade_pe, LIMITE_CONSERVACAO
            ),
        ]
        registrar_evento(
            "info",
            "Conservação de energia verificada",
            logger,
            resultados={verificacao.nome: verificacao.valor for verificacao in verificacoes}
        )
        return verificacoes
