"""
Serviço de passo - Integração da fase de balanço e composição de um passo.

Seguindo a ordem seção -> impulso -> balanço até o toque -> impacto -> reetiquetagem
-> balanço até a seção. Usado tanto pelo mapa de Poincaré quanto pela simulação.
"""
import logging
from typing import Callable, List

import numpy as np
from scipy.integrate import solve_ivp

from marcha_app.core.constantes import (
    AlvoIntegracao,
    FRACAO_ARMAR_TOQUE,
    ModoImpulso,
    MotivoFalhaPasso,
    TOLERANCIA_POSICAO_GUARDA,
)
from marcha_app.core.excecoes import FalhaPasso
from marcha_app.core.utilitarios import registrar_evento
from marcha_app.dominio import (
    ContextoMarcha,
    Estado,
    ResultadoPasso,
    TrechoBalanco,
)
from marcha_app.services.servico_controle import ServicoControle
from marcha_app.services.servico_hibrido import ServicoHibrido
from marcha_app.services.servico_modelo import ServicoModelo

logger = logging.getLogger(__name__)

# Nomes dos eventos de saída
EVENTO_ARMAR = 'armar toque'
EVENTO_FAIXA = 'faixa de contato'
EVENTO_TOQUE = 'toque'
EVENTO_MINIMO = 'minimo rasante'
EVENTO_SECAO = 'secao'
EVENTO_REVERSAO = 'reversao'
EVENTO_SAIDA_INFERIOR = 'saida inferior'
EVENTO_SAIDA_SUPERIOR = 'saida superior'

MOTIVOS_EVENTO = {
    EVENTO_REVERSAO: MotivoFalhaPasso.REVERSAO_VELOCIDADE,
    EVENTO_SAIDA_INFERIOR: MotivoFalhaPasso.FORA_DO_INTERVALO,
    EVENTO_SAIDA_SUPERIOR: MotivoFalhaPasso.FORA_DO_INTERVALO,
}


def _evento(funcao: Callable[[float, np.ndarray], float], direcao: int) -> Callable[[float, np.ndarray], float]:
    """Marca a função como evento terminal com a direção dada."""
    def evento(t: float, x: np.ndarray) -> float:
        return funcao(t, x)
    evento.terminal = True
    evento.direction = direcao
    return evento


class InterpoladorPorPartes:
    """Concatena saídas densas de trechos consecutivos."""

    def __init__(self, solucoes: list):
        self.solucoes = solucoes
        self.inicios = np.array([solucao.t[0] for solucao in solucoes])

    def __call__(self, tempos) -> np.ndarray:
        tempos = np.atleast_1d(tempos)
        indices = np.clip(np.searchsorted(self.inicios, tempos, side='right') - 1, 0, len(self.solucoes) - 1)
        colunas = [self.solucoes[indice].sol(t) for indice, t in zip(indices, tempos)]
        return np.column_stack(colunas)


class ServicoPasso:
    """Serviço para a integração de balanço e a execução de um passo."""

    @staticmethod
    def _eventos_falha(contexto: ContextoMarcha) -> dict:
        n = contexto.bipede.n
        inferior, superior = contexto.intervalo
        return {
            EVENTO_REVERSAO: _evento(lambda t, x: x[2 * n - 1], +1),
            EVENTO_SAIDA_INFERIOR: _evento(lambda t, x: x[n - 1] - inferior, -1),
            EVENTO_SAIDA_SUPERIOR: _evento(lambda t, x: x[n - 1] - superior, +1),
        }

    @staticmethod
    def _integrar_ate(contexto: ContextoMarcha, x0: np.ndarray, t0: float, t_final: float, eventos: dict):
        """
        Integra sob u_c até o primeiro evento terminal.

        Returns:
            (solucao, nome_do_evento)

        Raises:
            FalhaPasso: Evento de falha, integração interrompida ou orçamento esgotado
        """
        nomes = list(eventos)
        config = contexto.simulacao
        solucao = solve_ivp(
            lambda t, x: ServicoControle.dinamica_malha_fechada(contexto.marcha, contexto.bipede, contexto.ganhos, x),
            (t0, t_final),
            x0,
            method='DOP853',
            rtol=config.rtol,
            atol=config.atol,
            max_step=config.passo_maximo,
            events=[eventos[nome] for nome in nomes],
            dense_output=True,
        )
        if solucao.status == -1:
            raise FalhaPasso(MotivoFalhaPasso.FALHA_INTEGRACAO, float(solucao.t[-1]), solucao.y[:, -1])
        if solucao.status == 0:
            raise FalhaPasso(MotivoFalhaPasso.ORCAMENTO_ESGOTADO, float(solucao.t[-1]), solucao.y[:, -1])

        # evento que terminou a integração: o de menor instante
        disparados = [(tempos[0], nome) for nome, tempos in zip(nomes, solucao.t_events) if len(tempos)]
        _, nome = min(disparados)
        if nome in MOTIVOS_EVENTO:
            registrar_evento("warning", f"Falha de passo: {nome}", logger, tempo=float(solucao.t[-1]))
            raise FalhaPasso(MOTIVOS_EVENTO[nome], float(solucao.t[-1]), solucao.y[:, -1])
        return solucao, nome

    @staticmethod
    def integrar_balanco(
        contexto: ContextoMarcha,
        estado: Estado,
        alvo: AlvoIntegracao,
        tempo_inicial: float = 0.0
    ) -> TrechoBalanco:
        """
        Integra a fase de balanço sob u_c até o toque ou até a seção.

        O toque só é procurado depois de q2 passar de -theta1_i / 2. A partir daí a
        detecção tem duas fases: primeiro a entrada na faixa de contato
        gamma_y = tol_contato; depois gamma_y = 0 descendo ou um mínimo de gamma_y
        (toque rasante), o que vier antes. Se o pé já estiver na faixa ao armar,
        a segunda fase começa direto.

        Args:
            contexto: Modelo, marcha, ganhos, seção e tolerâncias
            estado: Estado inicial
            alvo: TOQUE ou SECAO
            tempo_inicial: Instante inicial (s)

        Returns:
            TrechoBalanco terminando no evento alvo

        Raises:
            FalhaPasso: Reversão de dq2, q2 fora do intervalo, orçamento esgotado ou falha do integrador
        """
        n = contexto.bipede.n
        config = contexto.simulacao
        inferior, superior = contexto.intervalo
        x0 = estado.como_vetor()
        if not inferior <= estado.q2 <= superior:
            raise FalhaPasso(MotivoFalhaPasso.FORA_DO_INTERVALO, tempo_inicial, x0)
        t_final = tempo_inicial + config.duracao_maxima_balanco

        def altura(t: float, x: np.ndarray) -> float:
            return ServicoModelo.posicao_pe_balanco(contexto.bipede, x[:n])[1]

        def velocidade_vertical(t: float, x: np.ndarray) -> float:
            return ServicoModelo.velocidade_pe_balanco(contexto.bipede, x[:n], x[n:])[1]

        solucoes = []
        if alvo == AlvoIntegracao.SECAO:
            q2_estrela = contexto.secao.q2_estrela
            eventos = {EVENTO_SECAO: _evento(lambda t, x: x[n - 1] - q2_estrela, contexto.secao.direcao)}
            eventos.update(ServicoPasso._eventos_falha(contexto))
            solucao, nome = ServicoPasso._integrar_ate(contexto, x0, tempo_inicial, t_final, eventos)
            solucoes.append(solucao)
        else:
            t_atual, x_atual = tempo_inicial, x0
            # No meio do apoio a perna de balanço cruza a de apoio com altura nula
            q2_armar = -FRACAO_ARMAR_TOQUE * contexto.marcha.theta1_i
            if x_atual[n - 1] > q2_armar:
                eventos = {EVENTO_ARMAR: _evento(lambda t, x: x[n - 1] - q2_armar, -1)}
                eventos.update(ServicoPasso._eventos_falha(contexto))
                solucao, _ = ServicoPasso._integrar_ate(contexto, x_atual, t_atual, t_final, eventos)
                solucoes.append(solucao)
                t_atual, x_atual = float(solucao.t[-1]), solucao.y[:, -1]

            if altura(t_atual, x_atual) > config.tolerancia_contato:
                eventos = {EVENTO_FAIXA: _evento(lambda t, x: altura(t, x) - config.tolerancia_contato, -1)}
                eventos.update(ServicoPasso._eventos_falha(contexto))
                solucao, _ = ServicoPasso._integrar_ate(contexto, x_atual, t_atual, t_final, eventos)
                solucoes.append(solucao)
                t_atual, x_atual = float(solucao.t[-1]), solucao.y[:, -1]

            eventos = {
                EVENTO_TOQUE: _evento(altura, -1),
                EVENTO_MINIMO: _evento(velocidade_vertical, +1),
            }
            eventos.update(ServicoPasso._eventos_falha(contexto))
            solucao, nome = ServicoPasso._integrar_ate(contexto, x_atual, t_atual, t_final, eventos)
            solucoes.append(solucao)

        tempos = np.concatenate([solucao.t for solucao in solucoes])
        estados = np.concatenate([solucao.y for solucao in solucoes], axis=1)
        return TrechoBalanco(
            tempos=tempos,
            estados=estados,
            tempo_final=float(tempos[-1]),
            estado_final=Estado.de_vetor(estados[:, -1]),
            evento=nome,
            interpolador=InterpoladorPorPartes(solucoes),
        )

    @staticmethod
    def aplicar_impulso(
        contexto: ContextoMarcha,
        estado: Estado,
        impulso: np.ndarray,
        modo: ModoImpulso,
        tempo_inicial: float = 0.0
    ) -> TrechoBalanco:
        """
        Aplica o impulso no modo pedido.

        Returns:
            Trecho do impulso (instantâneo no modo ideal); o estado resultante fica em estado_final
        """
        ideal = ServicoControle.aplicar_impulso_ideal(contexto.bipede, estado, impulso)
        if modo == ModoImpulso.IDEAL:
            return TrechoBalanco(
                tempos=np.array([tempo_inicial]),
                estados=ideal.como_vetor()[:, None],
                tempo_final=tempo_inicial,
                estado_final=ideal,
                evento='impulso',
            )
        return ServicoControle.aplicar_impulso_alto_ganho(
            contexto.bipede,
            contexto.alto_ganho,
            estado,
            ideal.dq1,
            rtol=contexto.simulacao.rtol,
            atol=contexto.simulacao.atol,
            tempo_inicial=tempo_inicial,
        )

    @staticmethod
    def percorrer_passo(
        contexto: ContextoMarcha,
        estado: Estado,
        impulso: np.ndarray,
        modo: ModoImpulso = ModoImpulso.IDEAL,
        tempo_inicial: float = 0.0
    ) -> ResultadoPasso:
        """
        Executa um passo completo a partir de um estado na seção.

        Args:
            contexto: Modelo, marcha, ganhos, seção e tolerâncias
            estado: Estado sobre a seção
            impulso: Impulso nas juntas atuadas
            modo: Realização do impulso
            tempo_inicial: Instante inicial (s)

        Returns:
            ResultadoPasso com todos os trechos, o impacto e o estado final na seção

        Raises:
            FalhaPasso: Se o passo não puder ser completado
        """
        # Passo 1: Impulso na seção
        trecho_impulso = ServicoPasso.aplicar_impulso(contexto, estado, impulso, modo, tempo_inicial)
        apos_impulso = trecho_impulso.estado_final

        # Passo 2: Balanço até o toque
        trecho_toque = ServicoPasso.integrar_balanco(
            contexto, apos_impulso, AlvoIntegracao.TOQUE, trecho_impulso.tempo_final
        )
        toque = trecho_toque.estado_final

        # Passo 3: Classificação do contato
        guarda = ServicoHibrido.avaliar_guarda(
            contexto.bipede,
            toque,
            tolerancia_posicao=max(TOLERANCIA_POSICAO_GUARDA, 2.0 * contexto.simulacao.tolerancia_contato),
        )

        # Passo 4: Impacto (identidade quando o toque é sem impacto)
        impacto = ServicoHibrido.aplicar_impacto(contexto.bipede, toque)

        # Passo 5: Troca de pernas
        reetiquetado = ServicoHibrido.reetiquetar(impacto.estado)

        # Passo 6: Balanço até a seção
        trecho_secao = ServicoPasso.integrar_balanco(
            contexto, reetiquetado, AlvoIntegracao.SECAO, trecho_toque.tempo_final
        )

        trechos: List[TrechoBalanco] = [trecho_impulso, trecho_toque, trecho_secao]
        comprimento = float(ServicoModelo.posicao_pe_balanco(contexto.bipede, toque.q)[0])
        return ResultadoPasso(
            estado_inicial=estado,
            estado_apos_impulso=apos_impulso,
            estado_toque=toque,
            impacto=impacto,
            guarda=guarda,
            estado_reetiquetado=reetiquetado,
            estado_final=trecho_secao.estado_final,
            trechos=trechos,
            duracao=float(trecho_secao.tempo_final - tempo_inicial),
            comprimento_passo=comprimento,
        )
