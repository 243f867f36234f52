"""
Serviço de VHC - Restrições holonômicas virtuais senoidais.

Seguindo a família theta_j = a_j theta_1 + k_j pi + G_j sin(H_j theta_1), j = 2..n,
este módulo monta Phi(q2) em coordenadas generalizadas, avalia as restrições de
marcha conservativa e resolve os parâmetros livres por mínimos quadrados.
"""
import logging
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, least_squares

from marcha_app.core.constantes import (
    MAXIMO_AVALIACOES_SOLVER,
    PONTOS_GRADE_REGULARIDADE,
    TOLERANCIA_RESIDUOS_VHC,
)
from marcha_app.core.excecoes import (
    ExcecaoDadosInvalidos,
    ExcecaoMarchaInviavel,
    ExcecaoVhcIrregular,
)
from marcha_app.core.utilitarios import diferenca_angular, normalizar_angulo, registrar_evento
from marcha_app.core.validadores import validar_intervalo
from marcha_app.dominio import (
    DefinicaoMarcha,
    Estado,
    ParametrosBipede,
    ParametrosVhc,
    ResultadoResolucaoVhc,
)
from marcha_app.services.servico_modelo import ServicoModelo

logger = logging.getLogger(__name__)

# Parâmetros que o solver pode ajustar; k é inteiro e H entra de forma transcendental
PREFIXOS_LIVRES = {'a': 'a', 'G': 'g'}
MARGEM_REGULARIDADE_PADRAO = 0.1


class ServicoVhc:
    """Serviço para avaliação e resolução das VHCs."""

    @staticmethod
    def angulos_vhc(parametros: ParametrosVhc, theta1) -> np.ndarray:
        """theta_2..theta_n impostos pela VHC para um dado theta_1."""
        return parametros.a * theta1 + parametros.k * np.pi + parametros.g * np.sin(parametros.h * theta1)

    @staticmethod
    def derivadas_vhc(parametros: ParametrosVhc, theta1) -> np.ndarray:
        """d theta_j / d theta_1, j = 2..n."""
        return parametros.a + parametros.g * parametros.h * np.cos(parametros.h * theta1)

    @staticmethod
    def segundas_derivadas_vhc(parametros: ParametrosVhc, theta1) -> np.ndarray:
        return -parametros.g * parametros.h ** 2 * np.sin(parametros.h * theta1)

    @staticmethod
    def coeficientes_phi(parametros: ParametrosVhc) -> Tuple[np.ndarray, np.ndarray, tuple]:
        """
        Coeficientes de Phi_c = theta_{c+1} - theta_c na forma
        inclinacao_c q2 + deslocamento_c + sum(amplitude sin(frequencia q2)).

        Termos com a mesma frequência são somados.

        Returns:
            (inclinacoes, deslocamentos, termos) com termos[c] = ((amplitude, frequencia), ...)
        """
        n = parametros.n
        inclinacoes = np.zeros(n - 1)
        deslocamentos = np.zeros(n - 1)
        termos = []
        for c in range(n - 1):
            inclinacao_anterior = parametros.a[c - 1] if c > 0 else 1.0
            k_anterior = parametros.k[c - 1] if c > 0 else 0
            inclinacoes[c] = parametros.a[c] - inclinacao_anterior
            deslocamentos[c] = (parametros.k[c] - k_anterior) * np.pi

            senoides: Dict[float, float] = {}
            senoides[float(parametros.h[c])] = senoides.get(float(parametros.h[c]), 0.0) + parametros.g[c]
            if c > 0:
                frequencia = float(parametros.h[c - 1])
                senoides[frequencia] = senoides.get(frequencia, 0.0) - parametros.g[c - 1]
            termos.append(tuple(
                (float(amplitude), frequencia)
                for frequencia, amplitude in sorted(senoides.items())
                if amplitude != 0.0
            ))
        return inclinacoes, deslocamentos, tuple(termos)

    @staticmethod
    def construir_marcha(parametros: ParametrosVhc) -> DefinicaoMarcha:
        """Monta a definição da marcha a partir dos parâmetros de VHC."""
        inclinacoes, deslocamentos, termos = ServicoVhc.coeficientes_phi(parametros)
        return DefinicaoMarcha(
            parametros=parametros,
            inclinacao=inclinacoes,
            deslocamento=deslocamentos,
            termos=termos,
        )

    @staticmethod
    def phi(marcha: DefinicaoMarcha, q2: float) -> np.ndarray:
        """Phi(q2): valor de q1 sobre a restrição."""
        angulos = np.append(q2, ServicoVhc.angulos_vhc(marcha.parametros, q2))
        return np.diff(angulos)

    @staticmethod
    def phi_linha(marcha: DefinicaoMarcha, q2: float) -> np.ndarray:
        """Phi'(q2)."""
        return np.diff(np.append(1.0, ServicoVhc.derivadas_vhc(marcha.parametros, q2)))

    @staticmethod
    def phi_duas_linhas(marcha: DefinicaoMarcha, q2: float) -> np.ndarray:
        """Phi''(q2)."""
        return np.diff(np.append(0.0, ServicoVhc.segundas_derivadas_vhc(marcha.parametros, q2)))

    @staticmethod
    def residuos_restricoes(parametros: ParametrosVhc, bipede: ParametrosBipede) -> np.ndarray:
        """
        Resíduos das condições de marcha conservativa em theta_1 = theta1_i.

        Ordem: simetria das pernas (j = 1..(n-1)/2), tronco vertical, igualdade das
        velocidades das juntas (j = 1..(n-1)/2) e velocidade vertical nula do pé.
        Ângulos são comparados módulo 2 pi.
        """
        n = parametros.n
        metade = (n - 1) // 2
        theta1_i = parametros.theta1_i
        theta = np.append(theta1_i, ServicoVhc.angulos_vhc(parametros, theta1_i))
        dtheta = np.append(1.0, ServicoVhc.derivadas_vhc(parametros, theta1_i))

        simetria = [normalizar_angulo(theta[n - j] + theta[j - 1] - np.pi) for j in range(1, metade + 1)]
        tronco = [normalizar_angulo(theta[metade])]
        velocidades = [dtheta[n - j] - dtheta[j - 1] for j in range(1, metade + 1)]
        pe = [float(np.sum(bipede.comprimentos[:metade] * np.sin(theta[:metade]) * dtheta[:metade]))]
        return np.array(simetria + tronco + velocidades + pe, dtype=float)

    @staticmethod
    def _substituir(parametros: ParametrosVhc, livres: Tuple[str, ...], valores: np.ndarray) -> ParametrosVhc:
        campos = {'a': np.array(parametros.a), 'g': np.array(parametros.g)}
        for nome, valor in zip(livres, valores):
            campos[PREFIXOS_LIVRES[nome[0]]][int(nome[1:]) - 2] = valor
        return ParametrosVhc(
            a=campos['a'], k=parametros.k, g=campos['g'], h=parametros.h, theta1_i=parametros.theta1_i
        )

    @staticmethod
    def resolver_parametros(
        chute: ParametrosVhc,
        bipede: ParametrosBipede,
        livres: Iterable[str] = ('G2', 'G4', 'G5', 'a5'),
        theta1_i: Optional[float] = None,
        margem: float = MARGEM_REGULARIDADE_PADRAO
    ) -> ResultadoResolucaoVhc:
        """
        Ajusta os parâmetros livres até zerar os resíduos das restrições.

        Os demais parâmetros ficam fixos no chute. Usa Levenberg-Marquardt quando há
        ao menos tantos resíduos quanto incógnitas; caso contrário, região de confiança.

        Args:
            chute: Parâmetros iniciais (e valores fixos)
            bipede: Parâmetros físicos
            livres: Nomes dos parâmetros livres ('a2'..'an', 'G2'..'Gn')
            theta1_i: Ângulo inicial do apoio; None mantém o do chute
            margem: Margem do intervalo usado na verificação de regularidade

        Returns:
            ResultadoResolucaoVhc com os parâmetros e o vetor de resíduos

        Raises:
            ExcecaoDadosInvalidos: Nome de parâmetro livre inválido
            ExcecaoMarchaInviavel: Se o solver não levar os resíduos abaixo da tolerância
        """
        livres = tuple(livres)
        n = chute.n
        for nome in livres:
            if nome[:1] not in PREFIXOS_LIVRES or not nome[1:].isdigit() or not 2 <= int(nome[1:]) <= n:
                raise ExcecaoDadosInvalidos(f"Parâmetro livre inválido: {nome}")
        if theta1_i is not None:
            chute = ParametrosVhc(a=chute.a, k=chute.k, g=chute.g, h=chute.h, theta1_i=theta1_i)

        def residuos(valores: np.ndarray) -> np.ndarray:
            return ServicoVhc.residuos_restricoes(ServicoVhc._substituir(chute, livres, valores), bipede)

        valores_iniciais = np.array([chute.como_dicionario()[nome] for nome in livres], dtype=float)
        if not livres:
            parametros = chute
            vetor = residuos(valores_iniciais)
            avaliacoes = 1
        else:
            metodo = 'lm' if residuos(valores_iniciais).size >= len(livres) else 'trf'
            try:
                resultado = least_squares(
                    residuos,
                    valores_iniciais,
                    method=metodo,
                    xtol=1e-15,
                    ftol=1e-15,
                    gtol=1e-15,
                    max_nfev=MAXIMO_AVALIACOES_SOLVER,
                )
            except ValueError as e:
                registrar_evento("error", "Falha no solver de VHC", logger, erro=str(e))
                raise ExcecaoMarchaInviavel(f"Nenhum parâmetro viável a partir deste chute: {e}") from e
            parametros = ServicoVhc._substituir(chute, livres, resultado.x)
            vetor = ServicoVhc.residuos_restricoes(parametros, bipede)
            avaliacoes = int(resultado.nfev)

        norma = float(np.max(np.abs(vetor)))
        if norma >= TOLERANCIA_RESIDUOS_VHC:
            registrar_evento("error", "Parâmetros de VHC inviáveis", logger, residuos=vetor, livres=livres)
            raise ExcecaoMarchaInviavel(
                f"Nenhum parâmetro viável a partir deste chute: resíduos {np.array2string(vetor, precision=3)}"
            )

        registrar_evento(
            "info",
            f"Parâmetros de VHC resolvidos em {avaliacoes} avaliações",
            logger,
            norma_residuos=norma,
            parametros={nome: parametros.como_dicionario()[nome] for nome in livres}
        )

        limite = abs(parametros.theta1_i) + margem
        try:
            ServicoVhc.verificar_regularidade(ServicoVhc.construir_marcha(parametros), bipede, (-limite, limite))
        except ExcecaoVhcIrregular as e:
            registrar_evento("warning", f"Marcha resolvida não é regular: {e}", logger)

        return ResultadoResolucaoVhc(parametros=parametros, residuos=vetor, avaliacoes=avaliacoes, livres=livres)

    @staticmethod
    def residuo_variedade(marcha: DefinicaoMarcha, estado: Estado) -> Tuple[np.ndarray, np.ndarray]:
        """
        Distância do estado à variedade de restrição.

        Returns:
            (rho, drho) com rho = q1 - Phi(q2) módulo 2 pi e drho = dq1 - Phi'(q2) dq2
        """
        rho = diferenca_angular(estado.q1, ServicoVhc.phi(marcha, estado.q2))
        drho = estado.dq1 - ServicoVhc.phi_linha(marcha, estado.q2) * estado.dq2
        return np.atleast_1d(rho), drho

    @staticmethod
    def denominador_regularidade(marcha: DefinicaoMarcha, bipede: ParametrosBipede, q2: float) -> float:
        """M12^T Phi'(q2) + M22 avaliado sobre a restrição."""
        q = np.append(ServicoVhc.phi(marcha, q2), q2)
        _, m12, m22 = ServicoModelo.particionar_matriz_massa(ServicoModelo.matriz_massa(bipede, q))
        return float(m12 @ ServicoVhc.phi_linha(marcha, q2) + m22)

    @staticmethod
    def verificar_regularidade(
        marcha: DefinicaoMarcha,
        bipede: ParametrosBipede,
        intervalo: Tuple[float, float]
    ) -> float:
        """
        Verifica a regularidade da VHC numa grade densa do intervalo.

        Returns:
            Mínimo de |M12^T Phi' + M22| na grade

        Raises:
            ExcecaoDadosInvalidos: Intervalo vazio
            ExcecaoVhcIrregular: Se o denominador troca de sinal ou se anula
        """
        inferior, superior = intervalo
        validar_intervalo(inferior, superior, "intervalo de regularidade")
        grade = np.linspace(inferior, superior, PONTOS_GRADE_REGULARIDADE)
        valores = np.array([ServicoVhc.denominador_regularidade(marcha, bipede, q2) for q2 in grade])

        trocas = np.nonzero(np.sign(valores[:-1]) * np.sign(valores[1:]) <= 0)[0]
        if trocas.size:
            indice = int(trocas[0])
            if valores[indice] == 0.0:
                raiz = float(grade[indice])
            elif valores[indice + 1] == 0.0:
                raiz = float(grade[indice + 1])
            else:
                raiz = brentq(
                    lambda q2: ServicoVhc.denominador_regularidade(marcha, bipede, q2),
                    grade[indice],
                    grade[indice + 1],
                )
            registrar_evento("error", "VHC não regular", logger, q2=raiz)
            raise ExcecaoVhcIrregular(f"VHC não regular no intervalo de operação: troca de sinal em q2 = {raiz:.6f}")

        minimo = float(np.min(np.abs(valores)))
        registrar_evento("info", "Regularidade verificada", logger, minimo=minimo, intervalo=intervalo)
        return minimo
