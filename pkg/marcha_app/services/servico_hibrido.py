"""
Serviço híbrido - Mapas discretos da marcha.

Salto impulsivo nas juntas atuadas, impacto inelástico do pé de balanço com o solo,
troca de rótulos entre as pernas e classificação dos conjuntos de guarda.
"""
import logging

import numpy as np

from marcha_app.core.constantes import (
    ClassificacaoGuarda,
    CONDICAO_MAXIMA,
    TOLERANCIA_POSICAO_GUARDA,
    TOLERANCIA_VELOCIDADE_GUARDA,
)
from marcha_app.core.excecoes import (
    ExcecaoContatoAmbiguo,
    ExcecaoImpactoDegenerado,
    ExcecaoNumerica,
)
from marcha_app.core.utilitarios import normalizar_angulo, registrar_evento
from marcha_app.core.validadores import validar_dimensao
from marcha_app.dominio import (
    ParametrosBipede,
    Estado,
    EstadoEstendido,
    MapaReetiquetagem,
    ResultadoGuarda,
    ResultadoImpacto,
)
from marcha_app.services.servico_modelo import ServicoModelo

logger = logging.getLogger(__name__)


class ServicoHibrido:
    """Serviço para os mapas discretos e os conjuntos de guarda."""

    @staticmethod
    def aplicar_salto_impulsivo(parametros: ParametrosBipede, estado: Estado, impulso: np.ndarray) -> Estado:
        """
        Aplica um impulso angular nas juntas atuadas.

        As posições não mudam; o salto de velocidade resolve M dq_delta = (impulso, 0),
        então a linha passiva M12^T dq1_delta + M22 dq2_delta = 0 é preservada.

        Args:
            parametros: Parâmetros do bípede
            estado: Estado antes do impulso
            impulso: Impulso nas n-1 juntas atuadas (N m s)

        Returns:
            Estado após o impulso

        Raises:
            ExcecaoNumerica: Se a matriz de massa for singular
        """
        impulso = validar_dimensao(impulso, parametros.n - 1, "impulso")
        if not np.any(impulso):
            return estado

        matriz = ServicoModelo.matriz_massa(parametros, estado.q)
        try:
            salto = np.linalg.solve(matriz, np.append(impulso, 0.0))
        except np.linalg.LinAlgError as e:
            registrar_evento("error", "Salto impulsivo com matriz singular", logger, q=estado.q)
            raise ExcecaoNumerica(f"Salto impulsivo indefinido: {e}") from e
        return Estado.de_coordenadas(estado.q, estado.dq + salto)

    @staticmethod
    def aplicar_impacto(parametros: ParametrosBipede, estado: Estado) -> ResultadoImpacto:
        """
        Impacto inelástico do pé de balanço com o solo.

        O estado é levado às coordenadas estendidas com o pé de apoio parado e o sistema
        de sela [[M_e, -Gamma^T], [Gamma, 0]] (dq_e+, I_g) = (M_e dq_e-, 0) é resolvido.

        Args:
            parametros: Parâmetros do bípede
            estado: Estado no instante do toque

        Returns:
            ResultadoImpacto com estado pós-impacto, impulso do solo e energias cinéticas

        Raises:
            ExcecaoImpactoDegenerado: Se o sistema de sela for singular
        """
        n = parametros.n
        estendido = EstadoEstendido.de_estado(estado)
        massa = ServicoModelo.matriz_massa_estendida(parametros, estendido.q_e)
        jacobiano = ServicoModelo.jacobiano_pe_balanco(parametros, estendido.q_e)

        sela = np.zeros((n + 4, n + 4))
        sela[:n + 2, :n + 2] = massa
        sela[:n + 2, n + 2:] = -jacobiano.T
        sela[n + 2:, :n + 2] = jacobiano
        lado_direito = np.concatenate([massa @ estendido.dq_e, np.zeros(2)])

        try:
            if np.linalg.cond(sela) > CONDICAO_MAXIMA:
                raise np.linalg.LinAlgError("número de condição acima do limite")
            solucao = np.linalg.solve(sela, lado_direito)
        except np.linalg.LinAlgError as e:
            registrar_evento("error", "Configuração de impacto degenerada", logger, q=estado.q)
            raise ExcecaoImpactoDegenerado(f"Configuração de impacto degenerada: {e}") from e

        velocidade = solucao[:n + 2]
        impulso_solo = solucao[n + 2:]
        energia_antes = 0.5 * estendido.dq_e @ massa @ estendido.dq_e
        energia_depois = 0.5 * velocidade @ massa @ velocidade

        if impulso_solo[1] < 0:
            registrar_evento(
                "warning",
                "Impulso vertical do solo negativo no impacto",
                logger,
                impulso_solo=impulso_solo
            )

        return ResultadoImpacto(
            estado=Estado.de_coordenadas(estado.q, velocidade[:n]),
            impulso_solo=impulso_solo,
            velocidade_estendida=velocidade,
            energia_cinetica_antes=float(energia_antes),
            energia_cinetica_depois=float(energia_depois),
        )

    @staticmethod
    def mapa_reetiquetagem(n: int) -> MapaReetiquetagem:
        """
        Monta V e Pi da troca de pernas.

        As linhas r < n-1 de V têm -1 na coluna n-2-r; a última linha é toda de uns.
        """
        v = np.zeros((n, n))
        for linha in range(n - 1):
            v[linha, n - 2 - linha] = -1.0
        v[n - 1, :] = 1.0

        pi = np.zeros(n)
        pi[(n - 1) // 2 - 1] = np.pi
        pi[(n + 1) // 2 - 1] = -np.pi
        pi[n - 1] = -np.pi
        return MapaReetiquetagem(v=v, pi=pi)

    @staticmethod
    def reetiquetar(estado: Estado) -> Estado:
        """
        Troca os papéis das pernas: x+ = blockdiag(V, V) x- + (Pi, 0).

        Os ângulos de saída são normalizados para (-pi, pi].
        """
        mapa = ServicoHibrido.mapa_reetiquetagem(estado.n)
        q = normalizar_angulo(mapa.v @ estado.q + mapa.pi)
        return Estado.de_coordenadas(q, mapa.v @ estado.dq)

    @staticmethod
    def avaliar_guarda(
        parametros: ParametrosBipede,
        estado: Estado,
        tolerancia_posicao: float = TOLERANCIA_POSICAO_GUARDA,
        tolerancia_velocidade: float = TOLERANCIA_VELOCIDADE_GUARDA
    ) -> ResultadoGuarda:
        """
        Classifica o estado em relação aos conjuntos de guarda S1 e S2.

        Args:
            parametros: Parâmetros do bípede
            estado: Estado a classificar
            tolerancia_posicao: Faixa |gamma_y| considerada contato
            tolerancia_velocidade: Limite de velocidade para toque sem impacto

        Returns:
            ResultadoGuarda com altura, velocidade do pé e classificação

        Raises:
            ExcecaoContatoAmbiguo: Se o pé está no solo subindo
        """
        altura = float(ServicoModelo.posicao_pe_balanco(parametros, estado.q)[1])
        velocidade = ServicoModelo.velocidade_pe_balanco(parametros, estado.q, estado.dq)

        if abs(altura) >= tolerancia_posicao:
            classificacao = ClassificacaoGuarda.NENHUMA
        elif np.linalg.norm(velocidade) < tolerancia_velocidade:
            classificacao = ClassificacaoGuarda.S2
        elif velocidade[1] > tolerancia_velocidade:
            registrar_evento(
                "error", "Contato ambíguo: pé de balanço subindo no solo", logger, velocidade=velocidade
            )
            raise ExcecaoContatoAmbiguo(
                f"Contato rasante ou de saída: velocidade vertical {velocidade[1]:.3e} m/s"
            )
        else:
            # deslizamento tangencial conta como impacto
            classificacao = ClassificacaoGuarda.S1

        return ResultadoGuarda(altura=altura, velocidade=velocidade, classificacao=classificacao)
